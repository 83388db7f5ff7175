#include "hpbem/assembly.hpp"

#include "hpbem/panel_integrals.hpp"
#include "hpbem/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace hpbem {

namespace {

constexpr double kOnLineTol = 1e-12;

double point_element_distance(const Element& e, const Vec2& x) {
    const PanelCoords pc = panel_coords(e, x);
    const double h = e.length();
    if (pc.a < 0.0) return h * std::hypot(pc.a, pc.b);
    if (pc.a > 1.0) return h * std::hypot(pc.a - 1.0, pc.b);
    return h * std::abs(pc.b);
}

// Gauss order for smooth (far) panel interactions, scaled with the separation.
int far_points(int deg, double dist, double hmax, const AssemblyOptions& opt) {
    int extra = static_cast<int>(std::ceil(12.0 * hmax / std::max(dist, 1e-30)));
    extra = std::max(opt.far_extra, std::min(14, extra));
    return deg + extra;
}

} // namespace

// deepest grading that keeps the node offsets representable: tau * h must stay
// well above the coordinate resolution at the element's position
int graded_level_cap(const Element& el, int levels, double sigma) {
    const double coord = el.a.cwiseAbs().maxCoeff() + el.length();
    const double tau_floor =
        1e3 * std::numeric_limits<double>::epsilon() * coord / el.length();
    if (tau_floor <= 0.0 || tau_floor >= 1.0) return 1;
    const int cap = static_cast<int>(std::floor(std::log(tau_floor) / std::log(sigma)));
    return std::max(1, std::min(levels, cap));
}

namespace {

// quadrature for a near-singular inner integral with closest point at tau=a
QuadratureRule near_rule(double a, int n_cell, int levels, double sigma) {
    if (a <= 0.05) return composite_graded_rule(GradedEnd::Left, levels, n_cell, sigma);
    if (a >= 0.95) return composite_graded_rule(GradedEnd::Right, levels, n_cell, sigma);
    QuadratureRule left = composite_graded_rule(GradedEnd::Right, levels, n_cell, sigma)
                              .mapped_to(0.0, a);
    QuadratureRule right = composite_graded_rule(GradedEnd::Left, levels, n_cell, sigma)
                               .mapped_to(a, 1.0);
    left.nodes.insert(left.nodes.end(), right.nodes.begin(), right.nodes.end());
    left.weights.insert(left.weights.end(), right.weights.begin(), right.weights.end());
    left.lo = 0.0;
    left.hi = 1.0;
    return left;
}

std::vector<double> poly_moments(int kmax) {
    std::vector<double> m(kmax + 1);
    for (int k = 0; k <= kmax; ++k) m[k] = 1.0 / (k + 1.0);
    return m;
}

} // namespace

std::vector<Mat2> inner_log_blocks(const LogKernel& ker, const ScalarSet& set,
                                   int e, const Vec2& x, const AssemblyOptions& opt) {
    const Element& el = set.element(e);
    const double h = el.length();
    const int nf = set.nfuns(e);
    const Mat& mono = set.mono(e);
    const int kmax = static_cast<int>(mono.cols()) - 1;
    std::vector<Mat2> out(nf, Mat2::Zero());

    const PanelCoords pc = panel_coords(el, x);
    const double dist = point_element_distance(el, x);
    const bool on_line = std::abs(pc.b) < kOnLineTol;
    const bool near = dist < opt.near_factor * h;
    const int deg = std::max(1, kmax);
    const int lv = graded_level_cap(el, opt.graded_levels, opt.graded_sigma);

    if (!near) {
        const QuadratureRule rule =
            gauss_rule(far_points(deg, dist, h, opt)).mapped_to(0.0, 1.0);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double tau = rule.nodes[q];
            const Mat2 Kv = ker(x - el.point(tau));
            for (int f = 0; f < nf; ++f)
                out[f] += rule.weights[q] * set.eval(e, f, tau) * h * Kv;
        }
        return out;
    }

    // log part, analytic: -log|x-y| = -log h - 1/2 log((tau-a)^2 + b^2)
    const std::vector<double> L = log_moments_01(pc.a, pc.b, kmax);
    const std::vector<double> P = poly_moments(kmax);
    for (int f = 0; f < nf; ++f) {
        double acc = 0.0;
        for (int k = 0; k <= kmax; ++k)
            acc += mono(f, k) * (-std::log(h) * P[k] + L[k]);
        out[f] += (ker.alpha * h * acc) * Mat2::Identity();
    }

    // rank-one part
    if (on_line) {
        // d parallel to the panel tangent: dd^T/r^2 is constant
        const Vec2 t = el.tangent();
        const Mat2 tt = t * t.transpose();
        for (int f = 0; f < nf; ++f) {
            double m0 = 0.0;
            for (int k = 0; k <= kmax; ++k) m0 += mono(f, k) * P[k];
            out[f] += (ker.beta * h * m0) * tt;
        }
    } else {
        const QuadratureRule rule =
            near_rule(pc.a, deg + opt.cell_extra, lv, opt.graded_sigma);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double tau = rule.nodes[q];
            const Vec2 d = x - el.point(tau);
            const double r2 = d.squaredNorm();
            if (!(r2 > 0.0)) continue; // colliding nodes at machine resolution
            const Mat2 Kv = (ker.beta / r2) * (d * d.transpose());
            for (int f = 0; f < nf; ++f)
                out[f] += rule.weights[q] * set.eval(e, f, tau) * h * Kv;
        }
    }
    return out;
}

std::vector<Mat2> inner_log_dds_blocks(const LogKernel& ker, const ScalarSet& set,
                                       int e, const Vec2& x, const Vec2& t_x,
                                       std::optional<double> self_tau,
                                       const AssemblyOptions& opt) {
    const Element& el = set.element(e);
    const double h = el.length();
    const int nf = set.nfuns(e);
    const Mat& mono = set.mono(e);
    const int kmax = static_cast<int>(mono.cols()) - 1;
    std::vector<Mat2> out(nf, Mat2::Zero());

    if (self_tau.has_value()) {
        // x = el.point(self_tau): log part via principal value moments; the
        // rank-one part is the constant t t^T, so its tangential derivative is 0
        const std::vector<double> Q = pv_inverse_moments_01(*self_tau, kmax);
        for (int f = 0; f < nf; ++f) {
            double acc = 0.0;
            for (int k = 0; k <= kmax; ++k) acc += mono(f, k) * Q[k];
            out[f] += (-ker.alpha * acc) * Mat2::Identity();
        }
        return out;
    }

    const double dist = point_element_distance(el, x);
    const PanelCoords pc = panel_coords(el, x);
    const bool near = dist < opt.near_factor * h;
    const int deg = std::max(1, kmax);
    const int lv = graded_level_cap(el, opt.graded_levels, opt.graded_sigma);
    const QuadratureRule rule =
        near ? near_rule(pc.a, deg + opt.cell_extra, lv, opt.graded_sigma)
             : gauss_rule(far_points(deg, dist, h, opt)).mapped_to(0.0, 1.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double tau = rule.nodes[q];
        const Vec2 d = x - el.point(tau);
        if (!(d.squaredNorm() > 0.0)) continue;
        const Mat2 Kv = ker.tangential_gradient(d, t_x);
        for (int f = 0; f < nf; ++f)
            out[f] += rule.weights[q] * set.eval(e, f, tau) * h * Kv;
    }
    return out;
}

std::vector<Mat2> inner_traction_core_blocks(const Material& m, const ScalarSet& set,
                                             int e, const Vec2& x, const Vec2& n_fixed,
                                             bool x_on_this_element,
                                             const AssemblyOptions& opt) {
    const Element& el = set.element(e);
    const double h = el.length();
    const int nf = set.nfuns(e);
    const Mat& mono = set.mono(e);
    const int kmax = static_cast<int>(mono.cols()) - 1;
    std::vector<Mat2> out(nf, Mat2::Zero());

    const PanelCoords pc = panel_coords(el, x);
    const double dist = point_element_distance(el, x);
    // analytic form for points on the panel line: on the coincident panel the
    // (d.n) terms vanish identically and the antisymmetric Cauchy part carries
    // the principal value; for collinear neighbors the same formula is a proper
    // integral. Points hovering over an endpoint (perpendicular neighbors at a
    // corner) fall through to the graded rule.
    const bool on_line =
        x_on_this_element ||
        (std::abs(pc.b) < 1e-13 && (pc.a < -1e-12 || pc.a > 1.0 + 1e-12));

    if (on_line) {
        // d = (a - tau) h t along the panel
        const double lam = m.lambda(), mu = m.mu();
        const double k1 = mu / (2.0 * M_PI * (lam + 2.0 * mu));
        const Vec2 t = el.tangent();
        const Mat2 A = t * n_fixed.transpose() - n_fixed * t.transpose();
        const std::vector<double> Q = pv_inverse_moments_01(pc.a, kmax);
        for (int f = 0; f < nf; ++f) {
            double acc = 0.0;
            for (int k = 0; k <= kmax; ++k) acc += mono(f, k) * Q[k];
            out[f] += (k1 * acc) * A;
        }
        return out;
    }

    const bool near = dist < opt.near_factor * h;
    const int deg = std::max(1, kmax);
    const int lv = graded_level_cap(el, opt.graded_levels, opt.graded_sigma);
    const QuadratureRule rule =
        near ? near_rule(pc.a, deg + opt.cell_extra, lv, opt.graded_sigma)
             : gauss_rule(far_points(deg, dist, h, opt)).mapped_to(0.0, 1.0);
    const double lam = m.lambda(), mu = m.mu();
    const double k1 = mu / (2.0 * M_PI * (lam + 2.0 * mu));
    const double k2 = (lam + mu) / (M_PI * (lam + 2.0 * mu));
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double tau = rule.nodes[q];
        const Vec2 d = x - el.point(tau);
        const double r2 = d.squaredNorm();
        if (!(r2 > 0.0)) continue;
        const double dn = d.dot(n_fixed);
        Mat2 T = (k1 * dn / r2) * Mat2::Identity();
        T.noalias() += (k1 / r2) * (d * n_fixed.transpose() - n_fixed * d.transpose());
        T.noalias() += (k2 * dn / (r2 * r2)) * (d * d.transpose());
        for (int f = 0; f < nf; ++f)
            out[f] += rule.weights[q] * set.eval(e, f, tau) * h * T;
    }
    return out;
}

std::vector<Mat2> inner_traction_dds_blocks(const Material& m, const ScalarSet& set,
                                            int e, const Vec2& x, const Vec2& n_y,
                                            const Vec2& t_x, bool x_on_this_element,
                                            const AssemblyOptions& opt) {
    const Element& el = set.element(e);
    const double h = el.length();
    const int nf = set.nfuns(e);
    std::vector<Mat2> out(nf, Mat2::Zero());
    const Mat& mono = set.mono(e);
    const int kmax = static_cast<int>(mono.cols()) - 1;

    if (x_on_this_element) {
        // the (d.n) terms and their tangential derivatives vanish identically
        // along the flat panel; the finite-part derivative of the Cauchy term
        // remains
        const PanelCoords pc = panel_coords(el, x);
        const double lam = m.lambda(), mu = m.mu();
        const double k1 = mu / (2.0 * M_PI * (lam + 2.0 * mu));
        const Vec2 t = el.tangent();
        const Mat2 A = t * n_y.transpose() - n_y * t.transpose();
        const std::vector<double> dQ = pv_inverse_moments_dds_01(pc.a, kmax);
        for (int f = 0; f < nf; ++f) {
            double acc = 0.0;
            for (int k = 0; k <= kmax; ++k) acc += mono(f, k) * dQ[k];
            out[f] += (k1 * acc / h) * A;
        }
        return out;
    }
    const PanelCoords pc = panel_coords(el, x);
    const double dist = point_element_distance(el, x);
    const bool near = dist < opt.near_factor * h;
    const int deg = std::max(1, kmax);
    const int lv = graded_level_cap(el, opt.graded_levels, opt.graded_sigma);
    const QuadratureRule rule =
        near ? near_rule(pc.a, deg + opt.cell_extra, lv, opt.graded_sigma)
             : gauss_rule(far_points(deg, dist, h, opt)).mapped_to(0.0, 1.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double tau = rule.nodes[q];
        const Vec2 d = x - el.point(tau);
        if (!(d.squaredNorm() > 0.0)) continue;
        // gradient of the core (callers transpose to the double layer integrand)
        const Mat2 Kv =
            traction_kernel_tangential_gradient(m, d, n_y, t_x).transpose();
        for (int f = 0; f < nf; ++f)
            out[f] += rule.weights[q] * set.eval(e, f, tau) * h * Kv;
    }
    return out;
}

namespace {

enum class PairKind { Identical, SharedStart, SharedEnd, Near, Far };

struct PairClass {
    PairKind kind;
    double dist = 0.0;
};

// SharedStart: Ex's start touches Ey; SharedEnd: Ex's end touches Ey.
PairClass classify(const Element& ex, const Element& ey, double near_factor) {
    const double tol = 1e-13;
    if ((ex.a - ey.a).norm() < tol && (ex.b - ey.b).norm() < tol)
        return {PairKind::Identical, 0.0};
    if ((ex.a - ey.b).norm() < tol || (ex.a - ey.a).norm() < tol)
        return {PairKind::SharedStart, 0.0};
    if ((ex.b - ey.a).norm() < tol || (ex.b - ey.b).norm() < tol)
        return {PairKind::SharedEnd, 0.0};
    const double d1 = point_element_distance(ey, ex.a);
    const double d2 = point_element_distance(ey, ex.b);
    const double d3 = point_element_distance(ex, ey.a);
    const double d4 = point_element_distance(ex, ey.b);
    const double dist = std::min(std::min(d1, d2), std::min(d3, d4));
    if (dist < near_factor * std::max(ex.length(), ey.length()))
        return {PairKind::Near, dist};
    return {PairKind::Far, dist};
}

QuadratureRule outer_rule(const PairClass& pc, const Element& ex, const Element& ey,
                          int deg, const AssemblyOptions& opt) {
    const int lv = graded_level_cap(ex, opt.graded_levels, opt.graded_sigma);
    switch (pc.kind) {
        case PairKind::Identical:
            return composite_graded_rule(GradedEnd::Both, lv,
                                         deg + opt.cell_extra, opt.graded_sigma);
        case PairKind::SharedStart:
            return composite_graded_rule(GradedEnd::Left, lv,
                                         deg + opt.cell_extra, opt.graded_sigma);
        case PairKind::SharedEnd:
            return composite_graded_rule(GradedEnd::Right, lv,
                                         deg + opt.cell_extra, opt.graded_sigma);
        case PairKind::Near: {
            const double da = point_element_distance(ey, ex.a);
            const double db = point_element_distance(ey, ex.b);
            return composite_graded_rule(da < db ? GradedEnd::Left : GradedEnd::Right,
                                         lv, deg + opt.cell_extra,
                                         opt.graded_sigma);
        }
        case PairKind::Far:
            break;
    }
    const double hmax = std::max(ex.length(), ey.length());
    return gauss_rule(far_points(deg, pc.dist, hmax, opt)).mapped_to(0.0, 1.0);
}

template <typename InnerFn, typename ScatterFn>
void galerkin_pair(const ScalarSet& test, int ex_i, const ScalarSet& trial, int ey_i,
                   const AssemblyOptions& opt, InnerFn inner, ScatterFn scatter) {
    const Element& ex = test.element(ex_i);
    const Element& ey = trial.element(ey_i);
    const PairClass pc = classify(ex, ey, opt.near_factor);
    const int deg_t = std::max(1, (int)test.mono(ex_i).cols() - 1);
    const int deg_y = std::max(1, (int)trial.mono(ey_i).cols() - 1);
    const QuadratureRule rule = outer_rule(pc, ex, ey, std::max(deg_t, deg_y), opt);
    const double hx = ex.length();
    const int nfx = test.nfuns(ex_i);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double taux = rule.nodes[q];
        const Vec2 x = ex.point(taux);
        const std::vector<Mat2> blocks = inner(ey_i, x, pc.kind == PairKind::Identical);
        for (int fa = 0; fa < nfx; ++fa) {
            const double wphi = rule.weights[q] * hx * test.eval(ex_i, fa, taux);
            if (wphi == 0.0) continue;
            scatter(fa, wphi, blocks);
        }
    }
}

void scatter_block(Mat& out, const ScalarSet& test, int ex_i, int fa,
                   const ScalarSet& trial, int ey_i, const std::vector<Mat2>& blocks,
                   double wphi) {
    const long ga = test.gids[ex_i][fa];
    if (ga < 0) return;
    for (int fb = 0; fb < trial.nfuns(ey_i); ++fb) {
        const long gb = trial.gids[ey_i][fb];
        if (gb < 0) continue;
        const Mat2& B = blocks[fb];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out(2 * ga + i, 2 * gb + j) += wphi * B(i, j);
    }
}

// Runs fn(e) for all test elements in passes of pairwise non-adjacent elements,
// so concurrent writes to shared nodal rows cannot collide.
void for_each_test_element(int n, const std::function<void(int)>& fn) {
    std::vector<int> even, odd;
    for (int e = 0; e < n; ++e) (e % 2 == 0 ? even : odd).push_back(e);
    int leftover = -1;
    if (n >= 3 && n % 2 == 1) {
        leftover = even.back(); // adjacent to element 0 on a closed curve
        even.pop_back();
    }
    auto run = [&](const std::vector<int>& list) {
        parallel_for(static_cast<long>(list.size()), [&](long lo, long hi) {
            for (long i = lo; i < hi; ++i) fn(list[i]);
        });
    };
    run(even);
    run(odd);
    if (leftover >= 0) fn(leftover);
}

} // namespace

Mat assemble_log_galerkin(const LogKernel& ker, const ScalarSet& test,
                          const ScalarSet& trial, const AssemblyOptions& opt,
                          bool same_set) {
    const int ntest = test.n_elems();
    const int ntrial = trial.n_elems();

    if (!same_set) {
        Mat out = Mat::Zero(test.n_vector_dofs(), trial.n_vector_dofs());
        for_each_test_element(ntest, [&](int ex_i) {
            for (int ey_i = 0; ey_i < ntrial; ++ey_i) {
                galerkin_pair(
                    test, ex_i, trial, ey_i, opt,
                    [&](int ey, const Vec2& x, bool) {
                        return inner_log_blocks(ker, trial, ey, x, opt);
                    },
                    [&](int fa, double wphi, const std::vector<Mat2>& blocks) {
                        scatter_block(out, test, ex_i, fa, trial, ey_i, blocks, wphi);
                    });
            }
        });
        return out;
    }

    // self-adjoint case: compute element-pair wedge, mirror, average diagonals
    Mat upper = Mat::Zero(test.n_vector_dofs(), trial.n_vector_dofs());
    Mat diag = Mat::Zero(test.n_vector_dofs(), trial.n_vector_dofs());
    for_each_test_element(ntest, [&](int ex_i) {
        for (int ey_i = ex_i; ey_i < ntrial; ++ey_i) {
            Mat& target = (ey_i == ex_i) ? diag : upper;
            galerkin_pair(
                test, ex_i, trial, ey_i, opt,
                [&](int ey, const Vec2& x, bool) {
                    return inner_log_blocks(ker, trial, ey, x, opt);
                },
                [&](int fa, double wphi, const std::vector<Mat2>& blocks) {
                    scatter_block(target, test, ex_i, fa, trial, ey_i, blocks, wphi);
                });
        }
    });
    return upper + upper.transpose() + 0.5 * (diag + diag.transpose());
}

Mat assemble_traction_galerkin(const Material& m, const ScalarSet& test,
                               const ScalarSet& trial, const AssemblyOptions& opt,
                               bool adjoint) {
    Mat out = Mat::Zero(test.n_vector_dofs(), trial.n_vector_dofs());
    const int ntest = test.n_elems();
    const int ntrial = trial.n_elems();
    for_each_test_element(ntest, [&](int ex_i) {
        const Element& ex = test.element(ex_i);
        for (int ey_i = 0; ey_i < ntrial; ++ey_i) {
            const Element& ey = trial.element(ey_i);
            const Vec2 n_fixed = adjoint ? ex.normal() : ey.normal();
            galerkin_pair(
                test, ex_i, trial, ey_i, opt,
                [&](int ey_l, const Vec2& x, bool identical) {
                    std::vector<Mat2> core = inner_traction_core_blocks(
                        m, trial, ey_l, x, n_fixed, identical, opt);
                    for (auto& B : core) {
                        Mat2 tmp = adjoint ? Mat2(-B) : Mat2(B.transpose());
                        B = tmp;
                    }
                    return core;
                },
                [&](int fa, double wphi, const std::vector<Mat2>& blocks) {
                    scatter_block(out, test, ex_i, fa, trial, ey_i, blocks, wphi);
                });
        }
    });
    return out;
}

Mat assemble_mass(const ScalarSet& test, const ScalarSet& trial,
                  const std::vector<double>* test_elem_weight) {
    Mat out = Mat::Zero(test.n_vector_dofs(), trial.n_vector_dofs());
    // test and trial sets may cover different element lists; integrate over the
    // intersection (matched by coordinates)
    for (int et = 0; et < test.n_elems(); ++et) {
        const Element& ex = test.element(et);
        for (int ey = 0; ey < trial.n_elems(); ++ey) {
            const Element& t = trial.element(ey);
            if ((ex.a - t.a).norm() > 1e-13 || (ex.b - t.b).norm() > 1e-13) continue;
            const int deg = (int)(test.mono(et).cols() + trial.mono(ey).cols());
            const QuadratureRule rule = gauss_rule(deg / 2 + 2).mapped_to(0.0, 1.0);
            const double w_el = test_elem_weight ? (*test_elem_weight)[et] : 1.0;
            const double h = ex.length();
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double tau = rule.nodes[q];
                for (int fa = 0; fa < test.nfuns(et); ++fa) {
                    const long ga = test.gids[et][fa];
                    if (ga < 0) continue;
                    const double va = test.eval(et, fa, tau);
                    for (int fb = 0; fb < trial.nfuns(ey); ++fb) {
                        const long gb = trial.gids[ey][fb];
                        if (gb < 0) continue;
                        const double val =
                            rule.weights[q] * h * w_el * va * trial.eval(ey, fb, tau);
                        out(2 * ga, 2 * gb) += val;
                        out(2 * ga + 1, 2 * gb + 1) += val;
                    }
                }
            }
        }
    }
    return out;
}

void frame_transform_rows(Mat& M, const MultiplierSet& mult) {
    for (int e = 0; e < mult.n_elems(); ++e) {
        const Vec2 n = mult.element(e).normal();
        const Vec2 t = mult.element(e).tangent();
        for (int f = 0; f < mult.nfuns(e); ++f) {
            const long g = mult.gids[e][f];
            Eigen::RowVectorXd rx = M.row(2 * g);
            Eigen::RowVectorXd ry = M.row(2 * g + 1);
            M.row(2 * g) = n.x() * rx + n.y() * ry;
            M.row(2 * g + 1) = t.x() * rx + t.y() * ry;
        }
    }
}

void frame_transform_cols(Mat& M, const MultiplierSet& mult) {
    for (int e = 0; e < mult.n_elems(); ++e) {
        const Vec2 n = mult.element(e).normal();
        const Vec2 t = mult.element(e).tangent();
        for (int f = 0; f < mult.nfuns(e); ++f) {
            const long g = mult.gids[e][f];
            Vec cx = M.col(2 * g);
            Vec cy = M.col(2 * g + 1);
            M.col(2 * g) = n.x() * cx + n.y() * cy;
            M.col(2 * g + 1) = t.x() * cx + t.y() * cy;
        }
    }
}

OperatorSet assemble_operators(const Mesh& mesh, const DiscreteSpaces& spaces,
                               const Material& m, const AssemblyOptions& opt) {
    OperatorSet ops;
    ops.options = opt;
    ops.V = assemble_log_galerkin(fundamental_kernel(m), *spaces.density,
                                  *spaces.density, opt, true);
    ops.K = assemble_traction_galerkin(m, *spaces.density, *spaces.primal, opt, false);
    ops.W = assemble_log_galerkin(hypersingular_kernel(m), *spaces.primal_deriv,
                                  *spaces.primal_deriv, opt, true);
    ops.M = assemble_mass(*spaces.density, *spaces.primal);
    return ops;
}

} // namespace hpbem
