#include "hpbem/contact.hpp"

#include <Eigen/LU>

#include <cmath>
#include <set>
#include <stdexcept>

namespace hpbem {

Vec SaddleSystem::equality_residual(const Vec& u, const Vec& lam) const {
    return A * u + (B - Stilde.transpose()) * lam - f;
}

Vec SaddleSystem::constraint_residual(const Vec& u, const Vec& lam) const {
    return (B.transpose() - Stilde) * u - Mgamma * lam - gap;
}

int DiscreteSolution::count(DofState s) const {
    int n = 0;
    for (auto v : state_n) n += (v == s);
    for (auto v : state_t) n += (v == s);
    return n;
}

namespace {

Vec assemble_load(const ProblemSpec& spec, const Mesh& mesh,
                  const DiscreteSpaces& spaces) {
    const ScalarSet& primal = *spaces.primal;
    Vec f = Vec::Zero(spaces.n_primal());
    for (int e = 0; e < primal.n_elems(); ++e) {
        const Element& el = primal.element(e);
        if (el.part != BoundaryPart::Neumann) continue;
        const QuadratureRule rule = gauss_rule(el.p + 10).mapped_to(0.0, 1.0);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double tau = rule.nodes[q];
            const Vec2 t = spec.traction(el.point(tau));
            const double w = rule.weights[q] * el.length();
            for (int fn = 0; fn < primal.nfuns(e); ++fn) {
                const long g = primal.gids[e][fn];
                if (g < 0) continue;
                const double v = w * primal.eval(e, fn, tau);
                f[2 * g] += v * t.x();
                f[2 * g + 1] += v * t.y();
            }
        }
    }
    return f;
}

Vec assemble_gap(const ProblemSpec& spec, const DiscreteSpaces& spaces) {
    const MultiplierSet& mult = *spaces.multiplier;
    Vec g = Vec::Zero(spaces.n_multiplier());
    for (int e = 0; e < mult.n_elems(); ++e) {
        const Element& el = mult.element(e);
        const QuadratureRule rule = gauss_rule(el.p + 10).mapped_to(0.0, 1.0);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double tau = rule.nodes[q];
            const double gv = spec.gap(el.point(tau));
            const double w = rule.weights[q] * el.length();
            for (int fn = 0; fn < mult.nfuns(e); ++fn) {
                const long gid = mult.gids[e][fn];
                g[2 * gid] += w * gv * mult.eval(e, fn, tau); // normal slots only
            }
        }
    }
    return g;
}

} // namespace

SaddleSystem assemble_system(const ProblemSpec& spec, const Mesh& mesh,
                             const DiscreteSpaces& spaces, const SteklovOperator& st,
                             const StabilizationMatrices& stab,
                             const AssemblyOptions& opt) {
    SaddleSystem sys;
    const double g0 = (stab.mode == StabilizationMode::Off) ? 0.0 : spec.gamma0;
    sys.gamma0 = g0;
    sys.A = st.S - g0 * stab.Shat;
    Mat B = assemble_mass(*spaces.multiplier, *spaces.primal);
    frame_transform_rows(B, *spaces.multiplier);
    sys.B = B.transpose();
    sys.Stilde = g0 * stab.Stilde;
    sys.Mgamma = g0 * stab.Mgamma;
    sys.f = assemble_load(spec, mesh, spaces);
    sys.gap = assemble_gap(spec, spaces);
    if (mesh.closed_curve()) {
        // ridge on the rigid functionals: keeps every active-set matrix
        // invertible without constraining the settlement the contact law picks
        sys.C = rigid_body_functionals(mesh, spaces);
        const double ridge = 1e-8 * sys.A.norm() / (sys.C.transpose() * sys.C).norm();
        sys.A += ridge * sys.C.transpose() * sys.C;
    }

    const MultiplierSet& mult = *spaces.multiplier;
    const long ns = spaces.n_multiplier() / 2;
    sys.fric_bound = Vec::Zero(ns);
    sys.control_points.resize(ns);
    sys.contact_local.resize(ns);
    sys.c_aug = Vec::Zero(ns);
    for (int e = 0; e < mult.n_elems(); ++e)
        for (int fn = 0; fn < mult.nfuns(e); ++fn) {
            const long g = mult.gids[e][fn];
            sys.control_points[g] = mult.control_point(e, fn);
            sys.contact_local[g] = e;
            // balances traction-scale multipliers against mass-scaled residuals;
            // larger values push the active-set decisions into cycling
            sys.c_aug[g] = (spec.c_aug > 0.0)
                               ? spec.c_aug
                               : spec.material.youngs_modulus / mult.element(e).length();
            if (spec.is_tresca()) {
                const double F = std::get<TrescaFriction>(spec.friction)
                                     .threshold(sys.control_points[g]);
                if (!(F > 0.0))
                    throw std::invalid_argument("Tresca threshold must be positive");
                sys.fric_bound[g] = F;
            } else {
                sys.fric_bound[g] = 0.0; // updated by the Coulomb fixed point
            }
        }
    return sys;
}

namespace {

struct ActiveSet {
    std::vector<DofState> n_state, t_state;
    bool operator==(const ActiveSet& o) const {
        return n_state == o.n_state && t_state == o.t_state;
    }
    bool operator<(const ActiveSet& o) const {
        if (n_state != o.n_state) return n_state < o.n_state;
        return t_state < o.t_state;
    }
};

ActiveSet classify_active(const SaddleSystem& sys, const Vec& u, const Vec& lam,
                          double c_scale) {
    const Vec r = sys.constraint_residual(u, lam);
    const long ns = sys.n_scalar_lam();
    ActiveSet as;
    as.n_state.resize(ns);
    as.t_state.resize(ns);
    for (long i = 0; i < ns; ++i) {
        const double c = c_scale * sys.c_aug[i];
        const double qn = lam[2 * i] + c * r[2 * i];
        as.n_state[i] = (qn > 0.0) ? DofState::ActiveN : DofState::InactiveN;
        const double qt = lam[2 * i + 1] + c * r[2 * i + 1];
        const double F = sys.fric_bound[i];
        if (qt >= F)
            as.t_state[i] = DofState::SlipPlus;
        else if (qt <= -F)
            as.t_state[i] = DofState::SlipMinus;
        else
            as.t_state[i] = DofState::Stick;
    }
    return as;
}

// One primal-dual active-set solve for a fixed pattern. With coulomb_coeff >= 0
// the slip rows enforce lam_t = +/- coeff * lam_n instead of the fixed bound
// (the coupled end-game of the friction fixed point).
void solve_pattern(const SaddleSystem& sys, const ActiveSet& as, Vec& u, Vec& lam,
                   double coulomb_coeff = -1.0) {
    const long nu_dofs = sys.n_u();
    const long nl = sys.n_lam();
    const long n = nu_dofs + nl;
    Mat J = Mat::Zero(n, n);
    Vec rhs = Vec::Zero(n);
    J.topLeftCorner(nu_dofs, nu_dofs) = sys.A;
    J.block(0, nu_dofs, nu_dofs, nl) = sys.B - sys.Stilde.transpose();
    rhs.head(nu_dofs) = sys.f;
    const Mat R = sys.B.transpose() - sys.Stilde; // (nl x nu)
    for (long i = 0; i < sys.n_scalar_lam(); ++i) {
        const long rn = nu_dofs + 2 * i;
        const long rt = nu_dofs + 2 * i + 1;
        if (as.n_state[i] == DofState::ActiveN) {
            J.row(rn).head(nu_dofs) = R.row(2 * i);
            J.row(rn).segment(nu_dofs, nl) = -sys.Mgamma.row(2 * i);
            rhs[rn] = sys.gap[2 * i];
        } else {
            J(rn, nu_dofs + 2 * i) = 1.0;
            rhs[rn] = 0.0;
        }
        if (as.t_state[i] == DofState::Stick) {
            J.row(rt).head(nu_dofs) = R.row(2 * i + 1);
            J.row(rt).segment(nu_dofs, nl) = -sys.Mgamma.row(2 * i + 1);
            rhs[rt] = sys.gap[2 * i + 1]; // zero
        } else if (coulomb_coeff >= 0.0) {
            const double sgn = (as.t_state[i] == DofState::SlipPlus) ? 1.0 : -1.0;
            J(rt, nu_dofs + 2 * i + 1) = 1.0;
            J(rt, nu_dofs + 2 * i) = -sgn * coulomb_coeff;
            rhs[rt] = 0.0;
        } else {
            J(rt, nu_dofs + 2 * i + 1) = 1.0;
            rhs[rt] = (as.t_state[i] == DofState::SlipPlus) ? sys.fric_bound[i]
                                                            : -sys.fric_bound[i];
        }
    }
    Eigen::PartialPivLU<Mat> lu(J);
    const Vec z = lu.solve(rhs);
    if (!z.allFinite())
        throw std::runtime_error("semismooth newton: singular linear system "
                                 "(gamma0 too large or degenerate constraints)");
    u = z.head(nu_dofs);
    lam = z.tail(nl);
}

double projection_residual_norm(const SaddleSystem& sys, const Vec& u, const Vec& lam) {
    const Vec req = sys.equality_residual(u, lam);
    const Vec r = sys.constraint_residual(u, lam);
    double acc = req.squaredNorm();
    const long ns = sys.n_scalar_lam();
    for (long i = 0; i < ns; ++i) {
        const double c = sys.c_aug[i];
        const double qn = lam[2 * i] + c * r[2 * i];
        const double pn = std::max(0.0, qn);
        const double dn = (lam[2 * i] - pn) / c;
        const double F = sys.fric_bound[i];
        const double qt = lam[2 * i + 1] + c * r[2 * i + 1];
        const double pt = std::min(F, std::max(-F, qt));
        const double dt = (lam[2 * i + 1] - pt) / c;
        acc += dn * dn + dt * dt;
    }
    return std::sqrt(acc);
}

void write_diag(std::ostream* s, int iter, double res, const DiscreteSolution& sol) {
    if (!s) return;
    int n_active = 0, n_slip = 0, n_stick = 0;
    for (auto v : sol.state_n) n_active += (v == DofState::ActiveN);
    for (auto v : sol.state_t) {
        n_slip += (v == DofState::SlipPlus || v == DofState::SlipMinus);
        n_stick += (v == DofState::Stick);
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"iter\":%d,\"residual\":%.6e,\"n_active_n\":%d,\"n_slip\":%d,"
                  "\"n_stick\":%d}\n",
                  iter, res, n_active, n_slip, n_stick);
    (*s) << buf;
}

} // namespace

DiscreteSolution semismooth_newton(const SaddleSystem& sys, const NewtonOptions& opts,
                                   const Vec* u0, const Vec* lam0) {
    if (!(opts.tol > 0.0)) throw std::invalid_argument("newton: tol > 0 required");
    DiscreteSolution sol;
    Vec u, lam;
    if (u0 && lam0) {
        u = *u0;
        lam = *lam0;
    } else {
        // initial guess: unconstrained linear solve with lambda = 0
        lam = Vec::Zero(sys.n_lam());
        u = Eigen::PartialPivLU<Mat>(sys.A).solve(sys.f);
    }
    const double scale = 1.0 + sys.f.norm();

    // active-set iteration with cycle recovery: revisiting a pattern without
    // convergence means the classification oscillates on degenerate DOFs;
    // shrinking the augmentation parameter breaks the tie (the root itself is
    // independent of it)
    double c_scale = 1.0;
    std::set<ActiveSet> seen;
    ActiveSet prev;
    bool have_prev = false;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const ActiveSet as = classify_active(sys, u, lam, c_scale);
        const bool same_pattern = have_prev && (as == prev);
        if (!same_pattern) solve_pattern(sys, as, u, lam);
        prev = as;
        have_prev = true;
        sol.state_n = as.n_state;
        sol.state_t = as.t_state;
        sol.newton_iterations = iter;
        sol.residual_norm = projection_residual_norm(sys, u, lam);
        write_diag(opts.diag_stream, iter, sol.residual_norm, sol);
        if (sol.residual_norm <= opts.tol * scale) {
            sol.converged = true;
            break;
        }
        if (same_pattern) break; // exact pattern fixed point above tolerance
        if (!seen.insert(as).second) {
            c_scale *= 0.1;
            seen.clear();
            if (c_scale < 1e-12) break;
        }
    }
    sol.u = u;
    sol.lam = lam;
    return sol;
}

DiscreteSolution solve_tresca(const ProblemSpec& spec, const Mesh& mesh,
                              const DiscreteSpaces& spaces, const SteklovOperator& st,
                              const StabilizationMatrices& stab,
                              const AssemblyOptions& opt, std::ostream* diag) {
    if (!spec.is_tresca()) throw std::invalid_argument("solve_tresca: Tresca spec required");
    SaddleSystem sys = assemble_system(spec, mesh, spaces, st, stab, opt);
    NewtonOptions nopts;
    nopts.tol = spec.newton_tol;
    nopts.max_iter = spec.newton_max_iter;
    nopts.diag_stream = diag;
    DiscreteSolution sol = semismooth_newton(sys, nopts);
    if (!sol.converged)
        throw std::runtime_error("solve_tresca: newton did not converge");
    sol.psi = st.density_of(sol.u);
    return sol;
}

DiscreteSolution solve_coulomb(const ProblemSpec& spec, const Mesh& mesh,
                               const DiscreteSpaces& spaces, const SteklovOperator& st,
                               const StabilizationMatrices& stab,
                               const AssemblyOptions& opt, std::ostream* diag) {
    if (spec.is_tresca())
        throw std::invalid_argument("solve_coulomb: Coulomb spec required");
    const double coeff = std::get<CoulombFriction>(spec.friction).coefficient;
    if (coeff < 0.0) throw std::invalid_argument("Coulomb coefficient must be >= 0");
    SaddleSystem sys = assemble_system(spec, mesh, spaces, st, stab, opt);

    Vec u, lam;
    {
        // start from the frictionless-free state: unconstrained solve, lambda = 0
        NewtonOptions warm;
        warm.tol = spec.newton_tol;
        warm.max_iter = 1;
        DiscreteSolution first = semismooth_newton(sys, warm);
        u = first.u;
        lam = first.lam;
    }

    DiscreteSolution sol;
    const long ns = sys.n_scalar_lam();
    // Tresca sweeps with bound updates identify the stick/slip pattern. Once the
    // pattern stabilizes or starts cycling, the slip relation
    // lam_t = +/- coeff lam_n is substituted as a linear constraint and the
    // coupled system is solved exactly; convergence is declared when that solve
    // is classification-consistent. Under-relaxation of the bound update damps
    // borderline oscillations of the plain sweep (same fixed points).
    double omega = 1.0;
    Vec bound_relaxed = sys.fric_bound;
    std::vector<double> changes;
    std::set<ActiveSet> seen;
    ActiveSet prev;
    int streak = 0;
    auto exact_bounds = [&](const Vec& l) {
        for (long i = 0; i < ns; ++i)
            sys.fric_bound[i] = coeff * std::max(0.0, l[2 * i]);
    };
    for (int outer = 1; outer <= spec.coulomb_max_outer; ++outer) {
        for (long i = 0; i < ns; ++i) {
            const double target = coeff * std::max(0.0, lam[2 * i]);
            bound_relaxed[i] = (1.0 - omega) * bound_relaxed[i] + omega * target;
        }
        sys.fric_bound = bound_relaxed;
        const ActiveSet as = classify_active(sys, u, lam, 1.0);
        streak = (outer > 1 && as == prev) ? streak + 1 : 1;
        prev = as;
        const bool cycling = !seen.insert(as).second && streak == 1;
        const bool coupled = streak >= 3 || cycling;
        Vec u_new = u, lam_new = lam;
        solve_pattern(sys, as, u_new, lam_new, coupled ? coeff : -1.0);
        const double change =
            std::sqrt((u_new - u).squaredNorm() + (lam_new - lam).squaredNorm());
        const double scale = 1.0 + std::sqrt(u.squaredNorm() + lam.squaredNorm());
        u = u_new;
        lam = lam_new;
        sol.state_n = as.n_state;
        sol.state_t = as.t_state;
        sol.coulomb_outer_iterations = outer;
        if (coupled) {
            exact_bounds(lam);
            sol.residual_norm = projection_residual_norm(sys, u, lam);
            write_diag(diag, outer, sol.residual_norm, sol);
            const ActiveSet check = classify_active(sys, u, lam, 1.0);
            if (check == as && sol.residual_norm <= 1e-8 * (1.0 + sys.f.norm())) {
                sol.converged = true;
                break;
            }
            bound_relaxed = sys.fric_bound;
            seen.clear();
        } else {
            sys.fric_bound = bound_relaxed;
            sol.residual_norm = projection_residual_norm(sys, u, lam);
            write_diag(diag, outer, sol.residual_norm, sol);
        }
        if (change <= spec.coulomb_tol * scale) {
            exact_bounds(lam);
            sol.converged = true;
            break;
        }
        changes.push_back(change);
        if (changes.size() >= 6) {
            double recent = 0.0, older = 0.0;
            for (int k = 0; k < 3; ++k) {
                recent = std::max(recent, changes[changes.size() - 1 - k]);
                older = std::max(older, changes[changes.size() - 4 - k]);
            }
            if (recent > 0.5 * older && omega > 1.0 / 64.0) {
                omega *= 0.5;
                changes.clear();
            }
        }
    }
    if (!sol.converged)
        throw std::runtime_error("solve_coulomb: fixed point did not converge");
    sol.u = u;
    sol.lam = lam;
    sol.psi = st.density_of(sol.u);
    return sol;
}

DiscreteSolution solve_problem(const ProblemSpec& spec, const Mesh& mesh,
                               const DiscreteSpaces& spaces, const SteklovOperator& st,
                               const StabilizationMatrices& stab,
                               const AssemblyOptions& opt, std::ostream* diag) {
    return spec.is_tresca() ? solve_tresca(spec, mesh, spaces, st, stab, opt, diag)
                            : solve_coulomb(spec, mesh, spaces, st, stab, opt, diag);
}

DiscreteSolution brute_force_solve(const SaddleSystem& sys, int max_pairs) {
    const long ns = sys.n_scalar_lam();
    if (ns > max_pairs)
        throw std::invalid_argument("brute_force_solve: too many multiplier DOFs");

    // precompute u = u_hat - U lam, r = q - R lam
    Eigen::PartialPivLU<Mat> alu(sys.A);
    const Vec u_hat = alu.solve(sys.f);
    const Mat U = alu.solve(Mat(sys.B - sys.Stilde.transpose()));
    const Mat Rcoup = sys.B.transpose() - sys.Stilde;
    const Vec q = Rcoup * u_hat - sys.gap;
    const Mat R = Rcoup * U + sys.Mgamma;

    const double tol_f = 1e-9 * (1.0 + sys.f.norm());
    DiscreteSolution best;
    double best_margin = -std::numeric_limits<double>::max();
    int n_feasible = 0;

    const long n_patterns_n = 1L << ns;
    std::vector<int> tpat(ns, 0);
    // iterate 2^ns normal patterns x 3^ns tangential patterns
    for (long pn = 0; pn < n_patterns_n; ++pn) {
        std::fill(tpat.begin(), tpat.end(), 0);
        while (true) {
            // build pattern
            std::vector<int> free_idx, bound_idx;
            Vec lam_bound = Vec::Zero(2 * ns);
            for (long i = 0; i < ns; ++i) {
                if ((pn >> i) & 1)
                    free_idx.push_back(2 * i); // active: r_n = 0
                else
                    bound_idx.push_back(2 * i); // lam_n = 0
                if (tpat[i] == 0)
                    free_idx.push_back(2 * i + 1); // stick: r_t = 0
                else {
                    bound_idx.push_back(2 * i + 1);
                    lam_bound[2 * i + 1] =
                        (tpat[i] == 1) ? sys.fric_bound[i] : -sys.fric_bound[i];
                }
            }
            // solve R_FF lam_F = q_F - R_FB lam_B
            const long nf = static_cast<long>(free_idx.size());
            Vec lam = lam_bound;
            bool ok = true;
            if (nf > 0) {
                Mat Rff(nf, nf);
                Vec rhs(nf);
                for (long a = 0; a < nf; ++a) {
                    rhs[a] = q[free_idx[a]];
                    for (long b = 0; b < nf; ++b) Rff(a, b) = R(free_idx[a], free_idx[b]);
                    for (long bi : bound_idx) rhs[a] -= R(free_idx[a], bi) * lam_bound[bi];
                }
                const Vec lf = Rff.fullPivLu().solve(rhs);
                if (!lf.allFinite()) ok = false;
                for (long a = 0; a < nf && ok; ++a) lam[free_idx[a]] = lf[a];
            }
            if (ok) {
                const Vec r = q - R * lam;
                // feasibility margins
                double margin = std::numeric_limits<double>::max();
                for (long i = 0; i < ns; ++i) {
                    if ((pn >> i) & 1)
                        margin = std::min(margin, lam[2 * i]); // need lam_n >= 0
                    else
                        margin = std::min(margin, -r[2 * i]); // need r_n <= 0
                    const double F = sys.fric_bound[i];
                    if (tpat[i] == 0)
                        margin = std::min(margin, F - std::abs(lam[2 * i + 1]));
                    else if (tpat[i] == 1)
                        margin = std::min(margin, r[2 * i + 1]); // slip+: r >= 0
                    else
                        margin = std::min(margin, -r[2 * i + 1]); // slip-: r <= 0
                }
                if (margin > -tol_f) {
                    ++n_feasible;
                    if (margin > best_margin) {
                        best_margin = margin;
                        best.lam = lam;
                        best.u = u_hat - U * lam;
                        best.converged = true;
                        best.state_n.assign(ns, DofState::InactiveN);
                        best.state_t.assign(ns, DofState::Stick);
                        for (long i = 0; i < ns; ++i) {
                            if ((pn >> i) & 1) best.state_n[i] = DofState::ActiveN;
                            if (tpat[i] == 1) best.state_t[i] = DofState::SlipPlus;
                            if (tpat[i] == 2) best.state_t[i] = DofState::SlipMinus;
                        }
                    }
                }
            }
            // advance ternary counter
            long i = 0;
            for (; i < ns; ++i) {
                if (++tpat[i] < 3) break;
                tpat[i] = 0;
            }
            if (i == ns) break;
        }
    }
    if (!best.converged)
        throw std::runtime_error("brute_force_solve: no feasible pattern (assembly bug?)");
    best.feasible_patterns = n_feasible;
    return best;
}

FeasibilityReport check_feasibility(const SaddleSystem& sys, const DiscreteSolution& sol) {
    FeasibilityReport rep;
    const long ns = sys.n_scalar_lam();
    const Vec r = sys.constraint_residual(sol.u, sol.lam);
    rep.scale = 1.0 + sys.f.norm();
    rep.min_lambda_n = 0.0;
    for (long i = 0; i < ns; ++i) {
        rep.min_lambda_n = std::min(rep.min_lambda_n, sol.lam[2 * i]);
        rep.max_tangential_excess = std::max(
            rep.max_tangential_excess, std::abs(sol.lam[2 * i + 1]) - sys.fric_bound[i]);
        rep.complementarity += std::abs(sol.lam[2 * i] * r[2 * i]);
    }
    return rep;
}

} // namespace hpbem
