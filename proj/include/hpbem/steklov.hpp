#pragma once

#include "hpbem/assembly.hpp"
#include "hpbem/evaluators.hpp"

#include <Eigen/Cholesky>

namespace hpbem {

/// Per-contact-element stabilization weight h_E / p_E^2 (the gamma_0 factor is
/// applied where the system is assembled, everything here is gamma_0 = 1).
struct GammaWeight {
    double gamma0 = 1.0;
    std::vector<double> per_element; // indexed like MultiplierSet::elems
    double value(int contact_local) const { return gamma0 * per_element[contact_local]; }
};

GammaWeight build_gamma(const MultiplierSet& mult, double gamma0);

/// Discrete Poincare-Steklov operator assembled from the layer potentials:
/// S = W + (K + 1/2 M)^T V^{-1} (K + 1/2 M).
struct SteklovOperator {
    OperatorSet ops;
    Eigen::LLT<Mat> V_llt;
    Mat KM; // K + 1/2 M
    Mat H;  // V^{-1} KM, the density map
    Mat S;

    /// density coefficients of the recovered single-layer density for a primal u
    Vec density_of(const Vec& u) const { return H * u; }
};

SteklovOperator build_steklov(const Mesh& mesh, const DiscreteSpaces& spaces,
                              const Material& mat, const AssemblyOptions& opt = {});

/// Pointwise S_hp evaluation operator on a quadrature of a boundary part:
/// row block q holds S_hp(basis_b)(x_q).
struct PointwiseSteklov {
    struct Point {
        std::size_t mesh_elem;
        int contact_local = -1; // index into the multiplier element list, -1 off contact
        double tau;
        double w_ds; // quadrature weight including the arclength jacobian
    };
    std::vector<Point> pts;
    Mat P; // (2 * pts.size()) x n_primal
};

enum class TraceFilter { ContactOnly, AllSigma };
enum class TraceRule { GaussInterior, GradedEnds };

PointwiseSteklov build_pointwise_steklov(const Mesh& mesh, const DiscreteSpaces& spaces,
                                         const Material& mat, const SteklovOperator& st,
                                         TraceFilter filter, bool exact_w,
                                         const AssemblyOptions& opt, int n_extra = 6,
                                         TraceRule rule = TraceRule::GaussInterior);

enum class StabilizationMode { Full, Approximate, Off };

/// Stabilization matrices at gamma_0 = 1 (all scale linearly in gamma_0):
///   Stilde: <gamma lambda, S_hp v>_{Gamma_C}   (multiplier frame rows)
///   Shat:   <gamma S_hp u, S_hp v>_{Gamma_C}
///   Mgamma: <gamma mu, lambda>_{Gamma_C}
struct StabilizationMatrices {
    StabilizationMode mode = StabilizationMode::Full;
    Mat Stilde;
    Mat Shat;
    Mat Mgamma;
};

StabilizationMatrices build_stabilization(const Mesh& mesh, const DiscreteSpaces& spaces,
                                          const Material& mat, const SteklovOperator& st,
                                          StabilizationMode mode,
                                          const AssemblyOptions& opt = {},
                                          bool exact_w = false);

/// Rigid body functionals <rho_k, v>_{L2(Gamma_Sigma)} for the three rigid
/// motions (two translations and one rotation), rows of a 3 x n_primal matrix.
Mat rigid_body_functionals(const Mesh& mesh, const DiscreteSpaces& spaces);

double min_eig_sym(const Mat& A);
/// Smallest eigenvalue of A restricted to the null space of the constraint rows C.
double min_eig_sym_constrained(const Mat& A, const Mat& C);

} // namespace hpbem
