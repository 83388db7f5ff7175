#pragma once

#include "hpbem/types.hpp"

#include <vector>

namespace hpbem {

enum class BasisKind { Bernstein, GLL };

/// Bernstein polynomial B_{i,q}(t) = C(q,i) t^i (1-t)^{q-i} on [0,1].
double bernstein_eval(int i, int q, double t);
double bernstein_derivative(int i, int q, double t);

/// GLL points of degree q mapped to [0,1] (q+1 points, endpoints included).
std::vector<double> gll_points_01(int q);

/// Lagrange basis on an arbitrary strictly increasing node set (barycentric form).
class NodalBasis {
public:
    explicit NodalBasis(std::vector<double> nodes);

    int degree() const { return static_cast<int>(nodes_.size()) - 1; }
    const std::vector<double>& nodes() const { return nodes_; }

    double eval(int i, double t) const;
    double derivative(int i, double t) const;

private:
    std::vector<double> nodes_;
    std::vector<double> bary_; // barycentric weights
};

/// Shifted Legendre polynomial P~_k on [0,1] (orthogonal, not normalized:
/// int_0^1 P~_k^2 = 1/(2k+1)).
double legendre01_eval(int k, double t);
double legendre01_derivative(int k, double t);

/// Monomial coefficients of a scalar basis set: row i holds the coefficients
/// c st basis_i(t) = sum_k c[k] t^k. Used by the analytic panel integration.
Mat bernstein_monomial_coeffs(int q);
Mat nodal_monomial_coeffs(const NodalBasis& basis);
Mat legendre01_monomial_coeffs(int degree);

} // namespace hpbem
