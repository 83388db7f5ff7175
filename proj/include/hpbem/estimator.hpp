#pragma once

#include "hpbem/contact.hpp"

#include <map>

namespace hpbem {

/// Per-element values of the residual error indicator, split by term.
/// Squared quantities except the two pairing terms (compl_n, stick), which are
/// nonnegative integrals entering the total linearly.
struct ErrorBreakdown {
    Vec neumann;      // (h/p) || t - S_hp u ||^2 on Gamma_N
    Vec contact;      // (h/p + h/p^2) || -lambda - S_hp u ||^2 on Gamma_C
    Vec density;      // h || d/ds (V psi - (K+1/2) u) ||^2
    Vec compl_n;      // <(lam_n)^+, (g - u_n)^+>
    Vec penetration;  // (p/h) || (g - u_n)^- ||^2
    Vec sign_n;       // (h/p) || (lam_n)^- ||^2
    Vec friction;     // (h/p) || (|lam_t| - F)^+ ||^2
    Vec stick;        // -<(|lam_t|-F)^-,|u_t|> + <|lam_t|,|u_t|> - <lam_t,u_t>
    bool residual_div10 = true;

    Vec element_eta2() const;
    double eta_total() const;
    double term_total(const Vec& v) const { return v.sum(); }
};

struct EstimatorOptions {
    bool residual_div10 = true;
    bool corollary_form = false; // simplified conforming-mode variant
    int n_quad_extra = 6;
    int n_quad_density = 16; // fixed rule for the derivative term
    bool exact_w = true;     // analytic tangential derivative in S_hp traces
};

ErrorBreakdown estimate_error(const DiscreteSolution& sol, const ProblemSpec& spec,
                              const Mesh& mesh, const DiscreteSpaces& spaces,
                              const SteklovOperator& st,
                              const EstimatorOptions& eopt = {},
                              const AssemblyOptions& opt = {});

/// hp-weighted L2 surrogates of the fractional norms:
///  -1/2: sum (h/p) ||.||^2,  +1/2: sum (p/h) ||.||^2.
double surrogate_half_norm(const std::vector<double>& elem_l2_sq,
                           const std::vector<double>& h, const std::vector<int>& p,
                           int sign);

/// Smallest-cardinality set (greedy on sorted eta^2) carrying at least
/// theta * total; ties broken by element id.
std::vector<long> dorfler_mark(const Mesh& mesh, const ErrorBreakdown& err, double theta);

struct AdaptiveState {
    double theta = 0.3;
    double delta = 0.5;
    int p_max = 10;
    bool has_history = false;
    std::map<long, double> prev_eta2;

    void record(const Mesh& mesh, const ErrorBreakdown& err);
};

/// Decide h vs p for marked elements by comparing the local indicator decay
/// against the smooth-decay expectation (elements without history split):
/// raise p iff eta_now <= (delta / sqrt 2) * eta_ancestor and p < p_max.
std::vector<RefinementMark> hp_decide(const Mesh& mesh, const std::vector<long>& marked,
                                      const ErrorBreakdown& current,
                                      const AdaptiveState& state);

enum class Strategy { UniformH, AdaptiveH, AdaptiveHp };
Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

struct StepRecord {
    Mesh mesh;
    DiscreteSolution sol;
    ErrorBreakdown err;
    long n_dof = 0;
};

struct LoopCallbacks {
    std::function<void(int step, const StepRecord&)> on_step;
    std::ostream* diag_stream = nullptr;
};

std::vector<StepRecord> adaptive_loop(const ProblemSpec& spec, const Mesh& mesh0,
                                      Strategy strategy, int n_steps,
                                      const EstimatorOptions& eopt = {},
                                      const AssemblyOptions& opt = {},
                                      const LoopCallbacks& cb = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace hpbem
