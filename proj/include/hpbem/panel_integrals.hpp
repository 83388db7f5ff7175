#pragma once

#include "hpbem/geometry.hpp"
#include "hpbem/types.hpp"

#include <vector>

namespace hpbem {

/// Local coordinates of a point relative to an element: x = A + a*h*t + b*h*n.
struct PanelCoords {
    double a; // tangential, in units of h (0..1 spans the element)
    double b; // normal offset, in units of h (signed)
};
PanelCoords panel_coords(const Element& e, const Vec2& x);

/// Analytic moments  L_k = int_0^1 tau^k * (-1/2) log((tau-a)^2 + b^2) dtau
/// for k = 0..kmax. Handles b = 0 with a inside or outside [0,1]
/// (integrable log singularity).
std::vector<double> log_moments_01(double a, double b, int kmax);

/// Principal-value moments  Q_k = pv int_0^1 tau^k / (xi - tau) dtau.
/// For xi outside [0,1] this is a proper integral; for xi inside it is the
/// Cauchy principal value.
std::vector<double> pv_inverse_moments_01(double xi, int kmax);

/// d/dxi of the principal-value moments (Hadamard finite part of the squared
/// kernel): Q_k'(xi) = fp int_0^1 -tau^k / (xi - tau)^2 dtau ... sign as the
/// xi-derivative of Q_k.
std::vector<double> pv_inverse_moments_dds_01(double xi, int kmax);

} // namespace hpbem
