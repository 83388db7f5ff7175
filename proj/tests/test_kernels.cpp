#include "hpbem/kernels.hpp"
#include "hpbem/panel_integrals.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hpbem;

namespace {
const Material kMat(5.0, 0.45);

Mat2 traction_fd(const Material& m, const Vec2& x, const Vec2& y, const Vec2& n) {
    // finite-difference traction of the Kelvin columns at y (transposed = K integrand)
    const double h = 1e-6;
    Mat2 M;
    for (int j = 0; j < 2; ++j) {
        Mat2 du; // du(i,k) = d u_i / d y_k of column j
        for (int k = 0; k < 2; ++k) {
            Vec2 e = Vec2::Zero();
            e[k] = h;
            const Vec2 up = fundamental_solution(m, x - (y + e)).col(j);
            const Vec2 um = fundamental_solution(m, x - (y - e)).col(j);
            du.col(k) = (up - um) / (2.0 * h);
        }
        const double div = du(0, 0) + du(1, 1);
        for (int i = 0; i < 2; ++i)
            M(i, j) = m.lambda() * n[i] * div + m.mu() * du.row(i).dot(n) +
                      m.mu() * du.col(i).dot(n);
    }
    return M.transpose();
}
} // namespace

TEST_CASE("fundamental solution values") {
    // frozen 50-digit reference values, E=5, nu=0.45, plane strain
    const Mat2 G1 = fundamental_solution(kMat, Vec2(1.0, 0.0));
    CHECK(G1(0, 0) == doctest::Approx(0.041959030451499679429978446707).epsilon(1e-14));
    CHECK(G1(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(G1(1, 1) == doctest::Approx(0.0).epsilon(1e-15));

    const Mat2 G2 = fundamental_solution(kMat, Vec2(0.3, -0.4));
    CHECK(G2(0, 0) == doctest::Approx(0.050005791350322954822958985531).epsilon(1e-14));
    CHECK(G2(0, 1) == doctest::Approx(-0.020140334616719846126389654420).epsilon(1e-14));
    CHECK(G2(1, 0) == doctest::Approx(-0.020140334616719846126389654420).epsilon(1e-14));
    CHECK(G2(1, 1) == doctest::Approx(0.061754319876742865063352950610).epsilon(1e-14));

    CHECK_THROWS(fundamental_solution(kMat, Vec2(0.0, 0.0)));
}

TEST_CASE("fundamental solution symmetries") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec2 d(unif(rng), unif(rng));
        if (d.norm() < 0.1) continue;
        const Mat2 G = fundamental_solution(kMat, d);
        const Mat2 Gm = fundamental_solution(kMat, -d);
        CHECK((G - Gm).norm() == doctest::Approx(0.0).epsilon(1e-14)); // even
        CHECK((G - G.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-14));
        // rotation equivariance G(Rd) = R G(d) R^T
        const double a = unif(rng);
        Mat2 R;
        R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        const Mat2 lhs = fundamental_solution(kMat, R * d);
        const Mat2 rhs = R * G * R.transpose();
        CHECK((lhs - rhs).norm() == doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("traction kernel values") {
    // frozen reference at d = (0,2), n = (0,1), E=5, nu=0.45
    const Mat2 T = traction_kernel(kMat, Vec2(0.0, 2.0), Vec2(0.0, 1.0));
    CHECK(T(0, 0) == doctest::Approx(0.0072343155950861516258583529).epsilon(1e-13));
    CHECK(T(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(T(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(T(1, 1) == doctest::Approx(0.15192062749680918414302541).epsilon(1e-13));

    // generic frozen point pins the transpose convention:
    // core T at d=(1.5,-0.7), n=(0.6,0.8); the K integrand is its transpose
    const Mat2 Tk = traction_kernel(kMat, Vec2(1.5, -0.7), Vec2(0.6, 0.8));
    CHECK(Tk(0, 0) == doctest::Approx(0.0312815059441633488012900103).epsilon(1e-13));
    CHECK(Tk(1, 0) == doctest::Approx(-0.0052057470524393182299985569).epsilon(1e-12));
    CHECK(Tk(0, 1) == doctest::Approx(-0.0223146394087014578415175812).epsilon(1e-12));
    CHECK(Tk(1, 1) == doctest::Approx(0.0082168011005406031413526755).epsilon(1e-12));
}

TEST_CASE("traction kernel properties") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec2 x(unif(rng), unif(rng));
        const Vec2 y(unif(rng) + 3.0, unif(rng));
        Vec2 n(unif(rng), unif(rng));
        n.normalize();
        // matches finite differences of the Kelvin solution
        const Mat2 T = traction_kernel(kMat, x - y, n);
        const Mat2 Tfd = traction_fd(kMat, x, y, n);
        CHECK((T - Tfd).norm() < 1e-6 * (1.0 + Tfd.norm()));
        // linear in n
        const Mat2 Tm = traction_kernel(kMat, x - y, -n);
        CHECK((T + Tm).norm() == doctest::Approx(0.0).epsilon(1e-14));
        // adjoint kernel flips sign of the derivative direction
        const Mat2 Ta = traction_kernel_adj(kMat, x - y, n);
        CHECK((Ta + T.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-14));
    }

    // 1/r decay along a fixed direction
    const Vec2 dir(0.8, 0.6);
    const Vec2 n(0.0, 1.0);
    const double t1 = traction_kernel(kMat, 2.0 * dir, n).norm();
    const double t2 = traction_kernel(kMat, 4.0 * dir, n).norm();
    CHECK(t1 / t2 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("kernel tangential gradients match finite differences") {
    const LogKernel fund = fundamental_kernel(kMat);
    const LogKernel hyper = hypersingular_kernel(kMat);
    const Vec2 y(0.2, -0.1);
    Vec2 t(0.6, 0.8);
    const Vec2 n(0.96, -0.28);
    const double h = 1e-6;
    for (const Vec2 x : {Vec2(1.0, 0.7), Vec2(-0.4, 0.9)}) {
        for (const LogKernel* k : {&fund, &hyper}) {
            const Mat2 fd = ((*k)(x + h * t - y) - (*k)(x - h * t - y)) / (2.0 * h);
            const Mat2 an = k->tangential_gradient(x - y, t);
            CHECK((fd - an).norm() < 1e-7 * (1.0 + an.norm()));
        }
        const Mat2 fdT = (traction_kernel(kMat, x + h * t - y, n) -
                          traction_kernel(kMat, x - h * t - y, n)) /
                         (2.0 * h);
        const Mat2 anT = traction_kernel_tangential_gradient(kMat, x - y, n, t);
        CHECK((fdT - anT).norm() < 1e-6 * (1.0 + anT.norm()));
    }
}

TEST_CASE("analytic log moments") {
    // compare against adaptive numerical integration
    auto num = [](double a, double b, int k) {
        const int N = 400000;
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
            const double t = (i + 0.5) / N;
            s += std::pow(t, k) * (-0.5) * std::log((t - a) * (t - a) + b * b);
        }
        return s / N;
    };
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{
             {0.3, 0.2}, {-0.5, 0.7}, {1.4, 0.1}, {0.5, 0.0}, {0.0, 0.0}, {-0.2, 0.0}}) {
        const std::vector<double> L = log_moments_01(a, b, 4);
        for (int k = 0; k <= 4; ++k)
            CHECK(L[k] == doctest::Approx(num(a, b, k)).epsilon(5e-6));
    }
}

TEST_CASE("principal value moments") {
    // pv int_0^1 1/(xi - t) dt = log|xi / (1 - xi)|
    for (double xi : {0.3, 0.71, -0.4, 1.5}) {
        const std::vector<double> Q = pv_inverse_moments_01(xi, 3);
        CHECK(Q[0] == doctest::Approx(std::log(std::abs(xi / (1.0 - xi)))).epsilon(1e-13));
        // k=1: pv int t/(xi-t) = -1 + xi log|xi/(1-xi)|
        CHECK(Q[1] == doctest::Approx(-1.0 + xi * Q[0] * 1.0).epsilon(1e-12));
    }
    // symmetric point: pv int t/(0.5 - t) dt = -1 (log term vanishes)
    const std::vector<double> Qh = pv_inverse_moments_01(0.5, 1);
    CHECK(Qh[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(Qh[1] == doctest::Approx(-1.0).epsilon(1e-14));
}
