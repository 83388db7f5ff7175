#include "hpbem/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace hpbem {

LogKernel fundamental_kernel(const Material& m) {
    const double lam = m.lambda(), mu = m.mu();
    const double c1 = (lam + 3.0 * mu) / (4.0 * M_PI * mu * (lam + 2.0 * mu));
    const double c2 = (lam + mu) / (lam + 3.0 * mu);
    return {c1, c1 * c2};
}

LogKernel hypersingular_kernel(const Material& m) {
    const double lam = m.lambda(), mu = m.mu();
    const double c = mu * (lam + mu) / (M_PI * (lam + 2.0 * mu));
    return {c, c};
}

Mat2 fundamental_solution(const Material& m, const Vec2& d) {
    if (!(d.squaredNorm() > 0.0))
        throw std::invalid_argument("fundamental_solution: zero distance");
    return fundamental_kernel(m)(d);
}

namespace {
// T_ij = k1 (delta_ij (d.n) - n_i d_j + n_j d_i)/r^2 + k2 d_i d_j (d.n)/r^4,
// the traction at y of the Kelvin columns, with d = x - y.
Mat2 traction_core(const Material& m, const Vec2& d, const Vec2& n) {
    const double lam = m.lambda(), mu = m.mu();
    const double r2 = d.squaredNorm();
    const double k1 = mu / (2.0 * M_PI * (lam + 2.0 * mu));
    const double k2 = (lam + mu) / (M_PI * (lam + 2.0 * mu));
    const double dn = d.dot(n);
    Mat2 T = (k1 * dn / r2) * Mat2::Identity();
    T.noalias() += (k1 / r2) * (d * n.transpose() - n * d.transpose());
    T.noalias() += (k2 * dn / (r2 * r2)) * (d * d.transpose());
    return T;
}
} // namespace

Mat2 traction_kernel(const Material& m, const Vec2& d, const Vec2& n_y) {
    if (!(d.squaredNorm() > 0.0))
        throw std::invalid_argument("traction_kernel: zero distance");
    return traction_core(m, d, n_y).transpose();
}

Mat2 traction_kernel_adj(const Material& m, const Vec2& d, const Vec2& n_x) {
    if (!(d.squaredNorm() > 0.0))
        throw std::invalid_argument("traction_kernel_adj: zero distance");
    // derivatives w.r.t. x flip the sign relative to the y-traction form
    return -traction_core(m, d, n_x);
}

Mat2 traction_kernel_tangential_gradient(const Material& m, const Vec2& d,
                                         const Vec2& n, const Vec2& t_x) {
    const double lam = m.lambda(), mu = m.mu();
    const double r2 = d.squaredNorm();
    const double k1 = mu / (2.0 * M_PI * (lam + 2.0 * mu));
    const double k2 = (lam + mu) / (M_PI * (lam + 2.0 * mu));
    const double dn = d.dot(n);
    const double dt = d.dot(t_x);
    const double tn = t_x.dot(n);
    // grad_x of traction_core(d(x), n), contracted with t_x; d = x - y
    Mat2 A = Mat2::Zero();
    // term k1 * dn / r2 * I
    A += k1 * (tn / r2 - 2.0 * dn * dt / (r2 * r2)) * Mat2::Identity();
    // term k1/r2 * (d n^T - n d^T)   [transpose of (n d^T - d n^T)]
    Mat2 S = t_x * n.transpose() - n * t_x.transpose();
    Mat2 D = d * n.transpose() - n * d.transpose();
    A += (k1 / r2) * S - (2.0 * k1 * dt / (r2 * r2)) * D;
    // term k2 * dn/r^4 * d d^T
    Mat2 P = t_x * d.transpose() + d * t_x.transpose();
    A += (k2 * tn / (r2 * r2)) * (d * d.transpose());
    A += (k2 * dn / (r2 * r2)) * P;
    A += (-4.0 * k2 * dn * dt / (r2 * r2 * r2)) * (d * d.transpose());
    // K integrand is core^T
    return A.transpose();
}

Vec2 linear_field_traction(const Material& m, const Mat2& A, const Vec2& n) {
    const double lam = m.lambda(), mu = m.mu();
    Mat2 eps = 0.5 * (A + A.transpose());
    Mat2 sigma = lam * eps.trace() * Mat2::Identity() + 2.0 * mu * eps;
    return sigma * n;
}

} // namespace hpbem
