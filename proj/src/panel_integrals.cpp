#include "hpbem/panel_integrals.hpp"

#include <cmath>

namespace hpbem {

PanelCoords panel_coords(const Element& e, const Vec2& x) {
    const double h = e.length();
    const Vec2 t = e.tangent();
    const Vec2 n = e.normal();
    const Vec2 r = x - e.a;
    return {r.dot(t) / h, r.dot(n) / h};
}

namespace {

// J_m(u) = int u^m log(u^2 + b^2) du, evaluated at u (antiderivative, b > 0)
// R_m(u) = int u^m / (u^2 + b^2) du
void antiderivatives(double u, double b, int mmax, std::vector<double>& J) {
    const double q = u * u + b * b;
    const double lg = std::log(q);
    std::vector<double> R(mmax + 1);
    R[0] = std::atan2(u, b) / b;
    if (mmax >= 1) R[1] = 0.5 * lg;
    for (int m = 2; m <= mmax; ++m) R[m] = std::pow(u, m - 1) / (m - 1) - b * b * R[m - 2];
    J.resize(mmax + 1);
    for (int m = 0; m <= mmax; ++m) {
        const double up = std::pow(u, m + 1);
        J[m] = (up * lg - 2.0 * (up / (m + 1) - b * b * R[m])) / (m + 1);
    }
}

// b = 0 variant: J_m(u) = int u^m log(u^2) du = 2 int u^m log|u| du
void antiderivatives_b0(double u, int mmax, std::vector<double>& J) {
    J.assign(mmax + 1, 0.0);
    if (u == 0.0) return;
    const double lg = std::log(std::abs(u));
    for (int m = 0; m <= mmax; ++m) {
        const double up = std::pow(u, m + 1);
        J[m] = 2.0 * up / (m + 1) * (lg - 1.0 / (m + 1));
    }
}

} // namespace

std::vector<double> log_moments_01(double a, double b, int kmax) {
    b = std::abs(b);
    const bool degenerate = (b < 1e-12);
    std::vector<double> J1, J0;
    if (degenerate) {
        antiderivatives_b0(1.0 - a, kmax, J1);
        antiderivatives_b0(-a, kmax, J0);
    } else {
        antiderivatives(1.0 - a, b, kmax, J1);
        antiderivatives(-a, b, kmax, J0);
    }
    // binomial expansion: tau^k = sum_m C(k,m) a^{k-m} u^m, u = tau - a
    std::vector<double> L(kmax + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        double acc = 0.0;
        double c = 1.0; // C(k,m) built incrementally
        for (int m = 0; m <= k; ++m) {
            if (m > 0) c = c * double(k - m + 1) / double(m);
            acc += c * std::pow(a, k - m) * (J1[m] - J0[m]);
        }
        L[k] = -0.5 * acc;
    }
    return L;
}

std::vector<double> pv_inverse_moments_01(double xi, int kmax) {
    // requires xi != 0 and xi != 1 (no evaluation at panel endpoints)
    std::vector<double> Q(kmax + 1, 0.0);
    const double lg = std::log(std::abs(xi / (1.0 - xi)));
    double xp = 1.0; // xi^k
    for (int k = 0; k <= kmax; ++k) {
        double s = 0.0;
        for (int m = 0; m <= k - 1; ++m) s += std::pow(xi, k - 1 - m) / (m + 1);
        Q[k] = -s + xp * lg;
        xp *= xi;
    }
    return Q;
}

std::vector<double> pv_inverse_moments_dds_01(double xi, int kmax) {
    std::vector<double> dQ(kmax + 1, 0.0);
    const double lg = std::log(std::abs(xi / (1.0 - xi)));
    for (int k = 0; k <= kmax; ++k) {
        double s = 0.0;
        for (int m = 0; m <= k - 2; ++m)
            s += double(k - 1 - m) * std::pow(xi, k - 2 - m) / (m + 1);
        const double xk1 = (k >= 1) ? k * std::pow(xi, k - 1) : 0.0;
        dQ[k] = -s + xk1 * lg + std::pow(xi, k) * (1.0 / xi + 1.0 / (1.0 - xi));
    }
    return dQ;
}

} // namespace hpbem
