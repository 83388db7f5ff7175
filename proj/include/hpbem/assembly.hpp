#pragma once

#include "hpbem/kernels.hpp"
#include "hpbem/material.hpp"
#include "hpbem/quadrature.hpp"
#include "hpbem/spaces.hpp"
#include "hpbem/types.hpp"

#include <optional>
#include <vector>

namespace hpbem {

struct AssemblyOptions {
    int far_extra = 4;        // far Gauss points = max degree + far_extra
    int cell_extra = 6;       // per-cell Gauss points = max degree + cell_extra
    int graded_levels = 12;
    double graded_sigma = 0.15;
    double near_factor = 1.0; // near if dist < near_factor * max(h)
};

/// Deepest geometric-grading level whose quadrature nodes remain resolvable in
/// double precision at the element's coordinates.
int graded_level_cap(const Element& el, int levels, double sigma);

/// Inner integrals  int_E chi_f(tau) Kernel(x - y(tau)) h dtau  for all local
/// scalar functions of `set` on element e; log part analytic when near.
std::vector<Mat2> inner_log_blocks(const LogKernel& ker, const ScalarSet& set,
                                   int e, const Vec2& x, const AssemblyOptions& opt);

/// Same for the x-tangential gradient of the log kernel; `self_tau` set when x
/// lies on this element (principal value handled analytically).
std::vector<Mat2> inner_log_dds_blocks(const LogKernel& ker, const ScalarSet& set,
                                       int e, const Vec2& x, const Vec2& t_x,
                                       std::optional<double> self_tau,
                                       const AssemblyOptions& opt);

/// Inner integrals of the traction core T(d, n) (see kernels.cpp). The caller
/// applies transposition (double layer) or negation (adjoint). On the
/// coincident flat panel the symmetric parts vanish identically and the
/// antisymmetric Cauchy part is integrated analytically in the principal-value
/// sense.
std::vector<Mat2> inner_traction_core_blocks(const Material& m, const ScalarSet& set,
                                             int e, const Vec2& x, const Vec2& n_fixed,
                                             bool x_on_this_element,
                                             const AssemblyOptions& opt);

/// x-tangential gradient of the core (finite-part form on the coincident panel).
std::vector<Mat2> inner_traction_dds_blocks(const Material& m, const ScalarSet& set,
                                            int e, const Vec2& x, const Vec2& n_y,
                                            const Vec2& t_x, bool x_on_this_element,
                                            const AssemblyOptions& opt);

/// Galerkin matrix of a log-type kernel: rows = test vector DOFs, cols = trial
/// vector DOFs. With same_set = true only the upper wedge is computed and
/// mirrored (V and W are self-adjoint).
Mat assemble_log_galerkin(const LogKernel& ker, const ScalarSet& test,
                          const ScalarSet& trial, const AssemblyOptions& opt,
                          bool same_set);

/// Galerkin matrix of the double layer kernel: entries
/// int int test_a(x)^T (T_y G(x,y))^T trial_b(y). If adjoint, the kernel is
/// T_x G(x,y) (normal taken at the test point).
Mat assemble_traction_galerkin(const Material& m, const ScalarSet& test,
                               const ScalarSet& trial, const AssemblyOptions& opt,
                               bool adjoint);

/// Mass matrix  int chi_a phi_b ds * I2, optionally weighted per test element.
Mat assemble_mass(const ScalarSet& test, const ScalarSet& trial,
                  const std::vector<double>* test_elem_weight = nullptr);

/// In-place frame transform of multiplier-indexed rows/cols: Cartesian
/// component pairs become (normal, tangential) pairs.
void frame_transform_rows(Mat& M, const MultiplierSet& mult);
void frame_transform_cols(Mat& M, const MultiplierSet& mult);

/// Assembled Galerkin operators over one mesh.
struct OperatorSet {
    Mat V;     // single layer on the density space
    Mat K;     // double layer: density x primal
    Mat W;     // hypersingular (regularized form): primal x primal
    Mat M;     // mass density x primal
    AssemblyOptions options;
};

OperatorSet assemble_operators(const Mesh& mesh, const DiscreteSpaces& spaces,
                               const Material& m, const AssemblyOptions& opt = {});

} // namespace hpbem
