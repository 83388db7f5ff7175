#include "hpbem/basis.hpp"

#include "hpbem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hpbem {

namespace {
double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}
} // namespace

double bernstein_eval(int i, int q, double t) {
    if (i < 0 || i > q) throw std::out_of_range("bernstein_eval: index out of range");
    return binom(q, i) * std::pow(t, i) * std::pow(1.0 - t, q - i);
}

double bernstein_derivative(int i, int q, double t) {
    if (i < 0 || i > q) throw std::out_of_range("bernstein_derivative: index out of range");
    double lo = (i > 0) ? bernstein_eval(i - 1, q - 1, t) : 0.0;
    double hi = (i < q) ? bernstein_eval(i, q - 1, t) : 0.0;
    return q * (lo - hi);
}

std::vector<double> gll_points_01(int q) {
    const QuadratureRule& r = gll_rule(q);
    std::vector<double> out(r.nodes.size());
    for (std::size_t i = 0; i < r.nodes.size(); ++i) out[i] = 0.5 * (r.nodes[i] + 1.0);
    return out;
}

NodalBasis::NodalBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    const int n = static_cast<int>(nodes_.size());
    bary_.assign(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i) bary_[i] /= (nodes_[i] - nodes_[j]);
}

double NodalBasis::eval(int i, double t) const {
    const int n = static_cast<int>(nodes_.size());
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        prod *= (t - nodes_[j]);
    }
    return bary_[i] * prod;
}

double NodalBasis::derivative(int i, double t) const {
    const int n = static_cast<int>(nodes_.size());
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        double prod = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i || j == k) continue;
            prod *= (t - nodes_[j]);
        }
        sum += prod;
    }
    return bary_[i] * sum;
}

double legendre01_eval(int k, double t) {
    const double x = 2.0 * t - 1.0;
    double p0 = 1.0, p1 = x;
    if (k == 0) return 1.0;
    if (k == 1) return x;
    for (int m = 2; m <= k; ++m) {
        double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double legendre01_derivative(int k, double t) {
    if (k == 0) return 0.0;
    const double x = 2.0 * t - 1.0;
    if (std::abs(x) < 1.0 - 1e-12) {
        double pk = legendre01_eval(k, t);
        double pk1 = legendre01_eval(k - 1, t);
        return 2.0 * k * (x * pk - pk1) / (x * x - 1.0);
    }
    // endpoint values of P'_k: P'_k(1) = k(k+1)/2, P'_k(-1) = (-1)^{k+1} k(k+1)/2
    double v = 0.5 * k * (k + 1.0);
    if (x < 0.0 && k % 2 == 0) v = -v;
    return 2.0 * v;
}

Mat bernstein_monomial_coeffs(int q) {
    // B_{i,q}(t) = sum_{k=i}^{q} (-1)^{k-i} C(q,i) C(q-i,k-i) t^k
    Mat C = Mat::Zero(q + 1, q + 1);
    for (int i = 0; i <= q; ++i)
        for (int k = i; k <= q; ++k) {
            double sgn = ((k - i) % 2 == 0) ? 1.0 : -1.0;
            C(i, k) = sgn * binom(q, i) * binom(q - i, k - i);
        }
    return C;
}

Mat nodal_monomial_coeffs(const NodalBasis& basis) {
    const int n = basis.degree() + 1;
    // Solve V^T C^T = I with V_{jk} = nodes_j^k: basis_i(nodes_j) = delta_ij.
    Mat V(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) V(j, k) = std::pow(basis.nodes()[j], k);
    Mat C = V.fullPivLu().solve(Mat::Identity(n, n)).transpose();
    return C;
}

Mat legendre01_monomial_coeffs(int degree) {
    // recurrence in monomial space: P~_m(t) with x = 2t-1
    const int n = degree + 1;
    Mat C = Mat::Zero(n, n);
    C(0, 0) = 1.0;
    if (degree >= 1) {
        C(1, 0) = -1.0;
        C(1, 1) = 2.0;
    }
    for (int m = 2; m <= degree; ++m) {
        // m P_m = (2m-1) x P_{m-1} - (m-1) P_{m-2}, x = 2t - 1
        for (int k = 0; k < n; ++k) {
            double xp = 0.0;
            if (k >= 1) xp += 2.0 * C(m - 1, k - 1);
            xp += -1.0 * C(m - 1, k);
            C(m, k) = ((2.0 * m - 1.0) * xp - (m - 1.0) * C(m - 2, k)) / m;
        }
    }
    return C;
}

} // namespace hpbem
