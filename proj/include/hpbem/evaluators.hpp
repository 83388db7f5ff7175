#pragma once

#include "hpbem/assembly.hpp"
#include "hpbem/spaces.hpp"

#include <optional>

namespace hpbem {

/// Pointwise evaluation of boundary potentials and their traces at points on
/// the boundary. Used by the stabilization assembly and the error indicator.
class PotentialEvaluator {
public:
    PotentialEvaluator(const Mesh& mesh, const DiscreteSpaces& spaces,
                       const Material& mat, const AssemblyOptions& opt = {});

    /// Potential of a log-type kernel over a scalar set with coefficients c
    /// (vector DOF layout). x may lie on the boundary.
    Vec2 log_potential(const LogKernel& ker, const ScalarSet& set, const Vec& c,
                       const Vec2& x) const;

    /// Tangential derivative of the log potential at x = element(tau).
    Vec2 log_potential_dds(const LogKernel& ker, const ScalarSet& set, const Vec& c,
                           std::size_t mesh_elem, double tau) const;

    /// Adjoint double layer K' applied to a density, evaluated at a boundary
    /// point x on element `mesh_elem` (coincident-panel contribution dropped).
    Vec2 adjoint_double_layer(const ScalarSet& set, const Vec& c, std::size_t mesh_elem,
                              double tau) const;

    /// Tangential derivative of the double layer potential K u at a boundary point.
    Vec2 double_layer_dds(const ScalarSet& primal, const Vec& u, std::size_t mesh_elem,
                          double tau) const;

    /// Single layer potential V psi at a boundary point (or anywhere).
    Vec2 single_layer(const Vec& psi, const Vec2& x) const;
    Vec2 single_layer_dds(const Vec& psi, std::size_t mesh_elem, double tau) const;

    /// V* u' -- the regularized hypersingular potential of the primal field u.
    Vec2 vstar_prime(const Vec& u, const Vec2& x) const;

    /// Steklov trace S_hp u = W u + (K' + 1/2) eta at a boundary point.
    /// The W part uses a central finite difference of step `fd_step` on the
    /// reference interval unless `exact_w` is set.
    Vec2 steklov_trace(const Vec& u, const Vec& eta, std::size_t mesh_elem, double tau,
                       bool exact_w = false) const;

    Vec2 density_value(const ScalarSet& set, const Vec& c, std::size_t mesh_elem,
                       double tau) const;

    double fd_step = 1e-4;

private:
    const Mesh* mesh_;
    const DiscreteSpaces* sp_;
    Material mat_;
    AssemblyOptions opt_;
    LogKernel fund_, hyper_;
};

} // namespace hpbem
