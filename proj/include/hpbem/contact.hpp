#pragma once

#include "hpbem/steklov.hpp"

#include <functional>
#include <ostream>
#include <string>
#include <variant>

namespace hpbem {

struct TrescaFriction {
    std::function<double(const Vec2&)> threshold; // F > 0 on Gamma_C
};
struct CoulombFriction {
    double coefficient = 0.0; // >= 0
};
using Friction = std::variant<TrescaFriction, CoulombFriction>;

/// Full problem description: geometry preset, material, loads, contact data.
struct ProblemSpec {
    std::shared_ptr<const PolygonalBoundary> boundary;
    Material material;
    std::function<double(const Vec2&)> gap;          // g on Gamma_C
    Friction friction;
    std::function<Vec2(const Vec2&)> traction;       // t on Gamma_N
    double gamma0 = 1e-3;
    BasisKind basis = BasisKind::Bernstein;
    StabilizationMode stab_mode = StabilizationMode::Full;
    double newton_tol = 1e-10;
    int newton_max_iter = 100;
    double coulomb_tol = 1e-10;
    int coulomb_max_outer = 200;
    double c_aug = -1.0; // <= 0: use the default 10 E / h_min scaling

    bool is_tresca() const { return std::holds_alternative<TrescaFriction>(friction); }
};

/// Assembled stabilized saddle system. All stabilization blocks carry their
/// gamma_0 factor already. On a closed curve the Steklov kernel (rigid body
/// motions) is regularized by a tiny ridge on the rigid functionals; the
/// contact and stick conditions pin the physical rigid components.
struct SaddleSystem {
    Mat A;        // S - Shat (+ ridge)      (n_u x n_u)
    Mat B;        // <mu, v> coupling        (n_u x n_lam, frame cols)
    Mat Stilde;   // <gamma mu, S_hp v>      (n_lam x n_u, frame rows)
    Mat Mgamma;   // <gamma mu, lam>         (n_lam x n_lam)
    Mat C;        // rigid body functionals (3 x n_u) or empty, diagnostics only
    Vec f;        // Neumann load
    Vec gap;      // <g, mu_n> entries (0 for tangential DOFs)
    Vec fric_bound;         // tangential bound per DOF pair (normal slots unused)
    std::vector<Vec2> control_points;   // per multiplier scalar DOF
    std::vector<int> contact_local;     // multiplier element of each scalar DOF
    Vec c_aug;                          // augmentation parameter per scalar DOF
    double gamma0 = 0.0;

    long n_u() const { return A.rows(); }
    long n_lam() const { return Mgamma.rows(); }
    long n_scalar_lam() const { return Mgamma.rows() / 2; }

    /// residual of the variational equality rows: A u + (B - Stilde^T) lam - f
    Vec equality_residual(const Vec& u, const Vec& lam) const;
    /// constraint residual r = (B^T - Stilde) u - Mgamma lam - gap
    Vec constraint_residual(const Vec& u, const Vec& lam) const;
};

SaddleSystem assemble_system(const ProblemSpec& spec, const Mesh& mesh,
                             const DiscreteSpaces& spaces, const SteklovOperator& st,
                             const StabilizationMatrices& stab,
                             const AssemblyOptions& opt = {});

enum class DofState { InactiveN, ActiveN, Stick, SlipPlus, SlipMinus };

struct DiscreteSolution {
    Vec u;    // primal coefficients
    Vec lam;  // multiplier coefficients, (normal, tangential) pairs
    Vec psi;  // recovered single-layer density
    int newton_iterations = 0;
    int coulomb_outer_iterations = 0;
    int feasible_patterns = 0; // set by brute_force_solve only
    bool converged = false;
    double residual_norm = 0.0;
    std::vector<DofState> state_n; // per scalar multiplier DOF
    std::vector<DofState> state_t;

    int count(DofState s) const;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 100;
    std::ostream* diag_stream = nullptr; // line-delimited JSON diagnostics
};

/// Semi-smooth Newton (primal-dual active set) on the projection form of the
/// complementarity system. Bounds F_i are taken from sys.fric_bound.
DiscreteSolution semismooth_newton(const SaddleSystem& sys, const NewtonOptions& opts,
                                   const Vec* u0 = nullptr, const Vec* lam0 = nullptr);

DiscreteSolution solve_tresca(const ProblemSpec& spec, const Mesh& mesh,
                              const DiscreteSpaces& spaces, const SteklovOperator& st,
                              const StabilizationMatrices& stab,
                              const AssemblyOptions& opt = {},
                              std::ostream* diag = nullptr);

DiscreteSolution solve_coulomb(const ProblemSpec& spec, const Mesh& mesh,
                               const DiscreteSpaces& spaces, const SteklovOperator& st,
                               const StabilizationMatrices& stab,
                               const AssemblyOptions& opt = {},
                               std::ostream* diag = nullptr);

DiscreteSolution solve_problem(const ProblemSpec& spec, const Mesh& mesh,
                               const DiscreteSpaces& spaces, const SteklovOperator& st,
                               const StabilizationMatrices& stab,
                               const AssemblyOptions& opt = {},
                               std::ostream* diag = nullptr);

/// Exhaustive active-set enumeration for small systems (testing oracle).
/// Throws if more than max_pairs multiplier DOF pairs are present.
DiscreteSolution brute_force_solve(const SaddleSystem& sys, int max_pairs = 12);

/// Feasibility and complementarity checks of a converged solution.
struct FeasibilityReport {
    double min_lambda_n = 0.0;        // most negative normal coefficient
    double max_tangential_excess = 0.0;
    double complementarity = 0.0;     // sum |lam_n * r_n|
    double scale = 1.0;
};
FeasibilityReport check_feasibility(const SaddleSystem& sys, const DiscreteSolution& sol);

} // namespace hpbem
