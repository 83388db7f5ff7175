#pragma once

#include "hpbem/material.hpp"
#include "hpbem/types.hpp"

namespace hpbem {

/// Kernels of the form  alpha * (-log r) I + beta * d d^T / r^2.
/// The fundamental solution uses (alpha, beta) = c1 * (1, c2); the kernel of
/// the regularized hypersingular form uses mu(lambda+mu)/(pi(lambda+2mu)) * (1, 1).
struct LogKernel {
    double alpha = 0.0;
    double beta = 0.0;

    Mat2 operator()(const Vec2& d) const {
        const double r2 = d.squaredNorm();
        Mat2 out = (-0.5 * alpha * std::log(r2)) * Mat2::Identity();
        out.noalias() += (beta / r2) * (d * d.transpose());
        return out;
    }

    /// t_x . grad_x of the kernel (2x2), observation-point tangential derivative.
    Mat2 tangential_gradient(const Vec2& d, const Vec2& t_x) const {
        const double r2 = d.squaredNorm();
        const double dt = d.dot(t_x);
        Mat2 out = (-alpha * dt / r2) * Mat2::Identity();
        out.noalias() += (beta / r2) * (t_x * d.transpose() + d * t_x.transpose());
        out.noalias() += (-2.0 * beta * dt / (r2 * r2)) * (d * d.transpose());
        return out;
    }
};

LogKernel fundamental_kernel(const Material& m);
LogKernel hypersingular_kernel(const Material& m); // modified single layer

/// Fundamental solution G(x,y) evaluated at d = x - y.
Mat2 fundamental_solution(const Material& m, const Vec2& d);

/// Integrand of the double layer potential: K v(x) = int traction_kernel * v(y).
/// Equals (traction at y applied to the columns of G)^T; d = x - y, n = n(y).
Mat2 traction_kernel(const Material& m, const Vec2& d, const Vec2& n_y);

/// Integrand of the adjoint double layer: K' mu(x) = int traction_kernel_adj * mu(y).
/// d = x - y, n = n(x).
Mat2 traction_kernel_adj(const Material& m, const Vec2& d, const Vec2& n_x);

/// t_x . grad_x of the double layer integrand (for tangential derivatives of Ku).
Mat2 traction_kernel_tangential_gradient(const Material& m, const Vec2& d,
                                         const Vec2& n_y, const Vec2& t_x);

/// Cauchy traction sigma(u) n of a linear displacement field u(x) = A x.
Vec2 linear_field_traction(const Material& m, const Mat2& A, const Vec2& n);

} // namespace hpbem
