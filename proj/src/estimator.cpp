#include "hpbem/estimator.hpp"

#include "hpbem/evaluators.hpp"
#include "hpbem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hpbem {

Vec ErrorBreakdown::element_eta2() const {
    const double s = residual_div10 ? 0.1 : 1.0;
    return s * (neumann + contact + density) + compl_n + penetration + sign_n +
           friction + stick;
}

double ErrorBreakdown::eta_total() const { return std::sqrt(element_eta2().sum()); }

ErrorBreakdown estimate_error(const DiscreteSolution& sol, const ProblemSpec& spec,
                              const Mesh& mesh, const DiscreteSpaces& spaces,
                              const SteklovOperator& st, const EstimatorOptions& eopt,
                              const AssemblyOptions& opt) {
    const long ne = static_cast<long>(mesh.size());
    ErrorBreakdown err;
    err.residual_div10 = eopt.residual_div10;
    for (Vec* v : {&err.neumann, &err.contact, &err.density, &err.compl_n,
                   &err.penetration, &err.sign_n, &err.friction, &err.stick})
        *v = Vec::Zero(ne);

    PotentialEvaluator ev(mesh, spaces, spec.material, opt);
    const Vec& u = sol.u;
    const Vec& psi = sol.psi;
    const double coulomb_coeff =
        spec.is_tresca() ? 0.0 : std::get<CoulombFriction>(spec.friction).coefficient;

    parallel_for(ne, [&](long lo, long hi) {
        for (long ie = lo; ie < hi; ++ie) {
            const Element& el = mesh.elements[ie];
            const double h = el.length();
            const double p = el.p;

            // residual of the variational equation (Neumann / contact parts)
            {
                const QuadratureRule rule = gauss_rule(el.p + eopt.n_quad_extra)
                                                .mapped_to(0.0, 1.0);
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const double tau = rule.nodes[q];
                    const double w = rule.weights[q] * h;
                    const Vec2 Shp =
                        ev.steklov_trace(u, psi, ie, tau, eopt.exact_w);
                    if (el.part == BoundaryPart::Neumann) {
                        const Vec2 res = spec.traction(el.point(tau)) - Shp;
                        err.neumann[ie] += (h / p) * w * res.squaredNorm();
                    } else {
                        const Vec2 lamv = spaces.multiplier_value(sol.lam, ie, tau);
                        const Vec2 res = -lamv - Shp;
                        err.contact[ie] += (h / p + h / (p * p)) * w * res.squaredNorm();

                        // contact complementarity / feasibility terms
                        const Vec2 nt = spaces.multiplier_nt(sol.lam, ie, tau);
                        const double lam_n = nt.x(), lam_t = nt.y();
                        const Vec2 uv = spaces.primal_value(u, ie, tau);
                        const double u_n = uv.dot(el.normal());
                        const double u_t = uv.dot(el.tangent());
                        const double g = spec.gap(el.point(tau));
                        const double Fb = spec.is_tresca()
                                              ? std::get<TrescaFriction>(spec.friction)
                                                    .threshold(el.point(tau))
                                              : coulomb_coeff * std::max(0.0, lam_n);
                        const double gu_pos = std::max(0.0, g - u_n);
                        const double gu_neg = std::min(0.0, g - u_n);
                        const double excess = std::abs(lam_t) - Fb;
                        if (eopt.corollary_form) {
                            err.compl_n[ie] += w * lam_n * gu_pos;
                            err.stick[ie] += w * (-excess * std::abs(u_t) +
                                                  std::abs(lam_t) * std::abs(u_t) -
                                                  lam_t * u_t);
                        } else {
                            err.compl_n[ie] += w * std::max(0.0, lam_n) * gu_pos;
                            err.sign_n[ie] +=
                                (h / p) * w * std::min(0.0, lam_n) * std::min(0.0, lam_n);
                            err.friction[ie] +=
                                (h / p) * w * std::max(0.0, excess) * std::max(0.0, excess);
                            err.stick[ie] += w * (-std::min(0.0, excess) * std::abs(u_t) +
                                                  std::abs(lam_t) * std::abs(u_t) -
                                                  lam_t * u_t);
                        }
                        err.penetration[ie] += (p / h) * w * gu_neg * gu_neg;
                    }
                }
            }

            // derivative of the first-equation defect V psi - (K + 1/2) u
            {
                const QuadratureRule rule =
                    gauss_rule(eopt.n_quad_density).mapped_to(0.0, 1.0);
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const double tau = rule.nodes[q];
                    const double w = rule.weights[q] * h;
                    Vec2 d = ev.single_layer_dds(psi, ie, tau);
                    d -= ev.double_layer_dds(*spaces.primal, u, ie, tau);
                    // 1/2 u term: tangential derivative of the primal trace
                    Vec2 du = Vec2::Zero();
                    for (int f = 0; f < spaces.primal->nfuns((int)ie); ++f) {
                        const long g = spaces.primal->gids[ie][f];
                        if (g < 0) continue;
                        const double dv =
                            spaces.primal->eval_deriv((int)ie, f, tau) / h;
                        du.x() += dv * u[2 * g];
                        du.y() += dv * u[2 * g + 1];
                    }
                    d -= 0.5 * du;
                    err.density[ie] += h * w * d.squaredNorm();
                }
            }
        }
    });
    return err;
}

double surrogate_half_norm(const std::vector<double>& elem_l2_sq,
                           const std::vector<double>& h, const std::vector<int>& p,
                           int sign) {
    double acc = 0.0;
    for (std::size_t i = 0; i < elem_l2_sq.size(); ++i) {
        const double w = (sign < 0) ? h[i] / p[i] : p[i] / h[i];
        acc += w * elem_l2_sq[i];
    }
    return acc;
}

std::vector<long> dorfler_mark(const Mesh& mesh, const ErrorBreakdown& err, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("dorfler_mark: theta in (0,1) required");
    const Vec eta2 = err.element_eta2();
    const double total = eta2.sum();
    std::vector<long> order(mesh.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        if (eta2[a] != eta2[b]) return eta2[a] > eta2[b];
        return mesh.elements[a].id < mesh.elements[b].id;
    });
    std::vector<long> marked;
    double acc = 0.0;
    for (long idx : order) {
        if (acc >= theta * total) break;
        if (eta2[idx] <= 0.0) break;
        marked.push_back(mesh.elements[idx].id);
        acc += eta2[idx];
    }
    return marked;
}

void AdaptiveState::record(const Mesh& mesh, const ErrorBreakdown& err) {
    const Vec eta2 = err.element_eta2();
    prev_eta2.clear();
    for (std::size_t i = 0; i < mesh.size(); ++i)
        prev_eta2[mesh.elements[i].id] = eta2[(long)i];
    has_history = true;
}

std::vector<RefinementMark> hp_decide(const Mesh& mesh, const std::vector<long>& marked,
                                      const ErrorBreakdown& current,
                                      const AdaptiveState& state) {
    const Vec eta2 = current.element_eta2();
    std::map<long, double> eta_now;
    for (std::size_t i = 0; i < mesh.size(); ++i)
        eta_now[mesh.elements[i].id] = std::sqrt(std::max(0.0, eta2[(long)i]));

    const double thr = state.delta / std::sqrt(2.0);
    std::vector<RefinementMark> marks;
    for (long id : marked) {
        const Element* el = mesh.find(id);
        if (!el) throw std::invalid_argument("hp_decide: unknown element id");
        double eta_prev = -1.0;
        if (state.has_history) {
            auto it = state.prev_eta2.find(id);
            if (it == state.prev_eta2.end() && el->parent_id >= 0)
                it = state.prev_eta2.find(el->parent_id);
            if (it != state.prev_eta2.end()) eta_prev = std::sqrt(std::max(0.0, it->second));
        }
        const bool smooth = eta_prev > 0.0 && eta_now[id] <= thr * eta_prev;
        const bool can_raise = el->p < state.p_max;
        marks.push_back({id, (smooth && can_raise) ? RefinementMark::Action::RaiseP
                                                   : RefinementMark::Action::SplitH});
    }
    return marks;
}

Strategy parse_strategy(const std::string& name) {
    if (name == "uniform_h") return Strategy::UniformH;
    if (name == "adaptive_h") return Strategy::AdaptiveH;
    if (name == "adaptive_hp") return Strategy::AdaptiveHp;
    throw std::invalid_argument("unknown strategy: " + name);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::UniformH: return "uniform_h";
        case Strategy::AdaptiveH: return "adaptive_h";
        case Strategy::AdaptiveHp: return "adaptive_hp";
    }
    return "?";
}

std::vector<StepRecord> adaptive_loop(const ProblemSpec& spec, const Mesh& mesh0,
                                      Strategy strategy, int n_steps,
                                      const EstimatorOptions& eopt,
                                      const AssemblyOptions& opt,
                                      const LoopCallbacks& cb) {
    if (n_steps < 1) throw std::invalid_argument("adaptive_loop: n_steps >= 1");
    std::vector<StepRecord> records;
    Mesh mesh = mesh0;
    AdaptiveState state;

    for (int step = 0; step < n_steps; ++step) {
        DiscreteSpaces spaces = build_spaces(mesh, spec.basis);
        SteklovOperator st = build_steklov(mesh, spaces, spec.material, opt);
        StabilizationMatrices stab =
            build_stabilization(mesh, spaces, spec.material, st, spec.stab_mode, opt);
        StepRecord rec;
        rec.mesh = mesh;
        rec.sol = solve_problem(spec, mesh, spaces, st, stab, opt, cb.diag_stream);
        rec.err = estimate_error(rec.sol, spec, mesh, spaces, st, eopt, opt);
        rec.n_dof = spaces.n_primal() + spaces.n_multiplier() +
                    (mesh.closed_curve() ? 3 : 0);
        if (cb.on_step) cb.on_step(step, rec);

        if (step + 1 < n_steps) {
            std::vector<RefinementMark> marks;
            if (strategy == Strategy::UniformH) {
                for (const auto& el : mesh.elements)
                    marks.push_back({el.id, RefinementMark::Action::SplitH});
            } else {
                const std::vector<long> marked = dorfler_mark(mesh, rec.err, state.theta);
                if (strategy == Strategy::AdaptiveH) {
                    for (long id : marked)
                        marks.push_back({id, RefinementMark::Action::SplitH});
                } else {
                    marks = hp_decide(mesh, marked, rec.err, state);
                }
            }
            state.record(mesh, rec.err);
            mesh = apply_marks(mesh, marks);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope: need matching samples");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hpbem
