#include "hpbem/basis.hpp"
#include "hpbem/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hpbem;

namespace {
double integrate(const QuadratureRule& r, const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
    return s;
}
} // namespace

TEST_CASE("gauss rules") {
    const QuadratureRule& g1 = gauss_rule(1);
    CHECK(g1.nodes[0] == doctest::Approx(0.0));
    CHECK(g1.weights[0] == doctest::Approx(2.0));

    const QuadratureRule& g2 = gauss_rule(2);
    CHECK(g2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(g2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

    // int_0^1 t^15 dt = 1/16 with 8 points after the affine map
    const QuadratureRule g8 = gauss_rule_01(8);
    const double v = integrate(g8, [](double t) { return std::pow(t, 15); });
    CHECK(v == doctest::Approx(1.0 / 16.0).epsilon(1e-13));

    // weights sum to interval length
    for (int n : {1, 2, 3, 5, 9, 16}) {
        double s = 0.0;
        for (double w : gauss_rule(n).weights) s += w;
        CHECK(s == doctest::Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("gauss-lobatto rules") {
    const QuadratureRule& r1 = gll_rule(1);
    REQUIRE(r1.nodes.size() == 2);
    CHECK(r1.nodes[0] == doctest::Approx(-1.0));
    CHECK(r1.nodes[1] == doctest::Approx(1.0));
    CHECK(r1.weights[0] == doctest::Approx(1.0));
    CHECK(r1.weights[1] == doctest::Approx(1.0));

    const QuadratureRule& r2 = gll_rule(2);
    REQUIRE(r2.nodes.size() == 3);
    CHECK(r2.nodes[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r2.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r2.weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    // q=5: exactness 2q-1 = 9 >= 8: int x^8 = 2/9
    const QuadratureRule& r5 = gll_rule(5);
    const double v = integrate(r5, [](double x) { return std::pow(x, 8); });
    CHECK(v == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("composite graded rules") {
    // int_0^1 log t dt = -1
    const QuadratureRule gr = composite_graded_rule(GradedEnd::Left, 10, 8, 0.15);
    const double v1 = integrate(gr, [](double t) { return std::log(t); });
    CHECK(v1 == doctest::Approx(-1.0).epsilon(1e-10));

    // int_0^1 t log t dt = -1/4
    const double v2 = integrate(gr, [](double t) { return t * std::log(t); });
    CHECK(v2 == doctest::Approx(-0.25).epsilon(1e-10));

    // right-graded mirror
    const QuadratureRule gright = composite_graded_rule(GradedEnd::Right, 10, 8, 0.15);
    const double v3 = integrate(gright, [](double t) { return std::log(1.0 - t); });
    CHECK(v3 == doctest::Approx(-1.0).epsilon(1e-10));

    // levels=1 reduces to two cells: [sigma,1] and [0,sigma]
    const QuadratureRule g1 = composite_graded_rule(GradedEnd::Left, 1, 4, 0.15);
    int below = 0, above = 0;
    for (double t : g1.nodes) (t < 0.15 ? below : above)++;
    CHECK(below == 4);     // base order at the singular end
    CHECK(above == 5);     // order grows by one per cell away from it
    CHECK(g1.nodes.size() == 9);

    // weights sum to the interval length
    double s = 0.0;
    for (double w : gr.weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));

    const QuadratureRule gb = composite_graded_rule(GradedEnd::Both, 10, 8, 0.15);
    const double v4 = integrate(gb, [](double t) { return std::log(t * (1.0 - t)); });
    CHECK(v4 == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("bernstein basis") {
    CHECK(bernstein_eval(1, 2, 0.5) == doctest::Approx(0.5));
    CHECK(bernstein_eval(0, 7, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS(bernstein_eval(3, 2, 0.5));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> qd(1, 10);
    for (int trial = 0; trial < 100; ++trial) {
        const int q = qd(rng);
        const double t = unif(rng);
        double sum = 0.0, lin = 0.0;
        for (int i = 0; i <= q; ++i) {
            const double b = bernstein_eval(i, q, t);
            CHECK(b >= 0.0);
            sum += b;
            lin += (double(i) / q) * b;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lin == doctest::Approx(t).epsilon(1e-12)); // reproduces linears
    }

    // derivative vs finite differences
    for (int i = 0; i <= 4; ++i) {
        const double t = 0.37;
        const double fd =
            (bernstein_eval(i, 4, t + 1e-7) - bernstein_eval(i, 4, t - 1e-7)) / 2e-7;
        CHECK(bernstein_derivative(i, 4, t) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("gll nodal basis cardinality") {
    for (int q : {1, 2, 4, 7}) {
        const std::vector<double> pts = gll_points_01(q);
        const NodalBasis basis(pts);
        for (int i = 0; i <= q; ++i)
            for (int j = 0; j <= q; ++j)
                CHECK(basis.eval(i, pts[j]) == doctest::Approx(i == j ? 1.0 : 0.0)
                                                   .epsilon(1e-12));
    }
}

TEST_CASE("monomial coefficient tables") {
    // Bernstein row sums reproduce the partition of unity in monomial space
    const Mat C = bernstein_monomial_coeffs(3);
    for (int k = 0; k <= 3; ++k) {
        double s = 0.0;
        for (int i = 0; i <= 3; ++i) s += C(i, k);
        CHECK(s == doctest::Approx(k == 0 ? 1.0 : 0.0).epsilon(1e-12));
    }
    // nodal coefficients evaluate back to the basis
    const NodalBasis nb(gll_points_01(3));
    const Mat Cn = nodal_monomial_coeffs(nb);
    for (int f = 0; f <= 3; ++f) {
        const double t = 0.618;
        double v = 0.0;
        for (int k = 0; k <= 3; ++k) v += Cn(f, k) * std::pow(t, k);
        CHECK(v == doctest::Approx(nb.eval(f, t)).epsilon(1e-12));
    }
    // shifted Legendre: orthogonality spot check via exact Gauss
    const Mat Cl = legendre01_monomial_coeffs(4);
    const QuadratureRule g = gauss_rule_01(6);
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        dot += g.weights[i] * legendre01_eval(2, g.nodes[i]) * legendre01_eval(3, g.nodes[i]);
    CHECK(dot == doctest::Approx(0.0).epsilon(1e-14));
    (void)Cl;
}
