#include "hpbem/steklov.hpp"

#include "hpbem/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <map>
#include <stdexcept>

namespace hpbem {

GammaWeight build_gamma(const MultiplierSet& mult, double gamma0) {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("build_gamma: gamma0 > 0 required");
    GammaWeight g;
    g.gamma0 = gamma0;
    g.per_element.resize(mult.n_elems());
    for (int e = 0; e < mult.n_elems(); ++e) {
        const Element& el = mult.element(e);
        g.per_element[e] = el.length() / double(el.p * el.p);
    }
    return g;
}

SteklovOperator build_steklov(const Mesh& mesh, const DiscreteSpaces& spaces,
                              const Material& mat, const AssemblyOptions& opt) {
    SteklovOperator st;
    st.ops = assemble_operators(mesh, spaces, mat, opt);
    st.V_llt.compute(st.ops.V);
    if (st.V_llt.info() != Eigen::Success)
        throw std::runtime_error("build_steklov: single layer matrix not SPD "
                                 "(quadrature or geometry defect)");
    st.KM = st.ops.K + 0.5 * st.ops.M;
    st.H = st.V_llt.solve(st.KM);
    st.S = st.ops.W + st.KM.transpose() * st.H;
    st.S = 0.5 * (st.S + st.S.transpose().eval());
    return st;
}

namespace {

// evaluation matrix of V* u' at a point: (2 x n_primal)
Mat vstar_prime_rows(const DiscreteSpaces& sp, const LogKernel& hyper, const Vec2& x,
                     const AssemblyOptions& opt) {
    const ScalarSet& set = *sp.primal_deriv;
    Mat E = Mat::Zero(2, set.n_vector_dofs());
    for (int e = 0; e < set.n_elems(); ++e) {
        const std::vector<Mat2> blocks = inner_log_blocks(hyper, set, e, x, opt);
        for (int f = 0; f < set.nfuns(e); ++f) {
            const long g = set.gids[e][f];
            if (g < 0) continue;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) E(i, 2 * g + j) += blocks[f](i, j);
        }
    }
    return E;
}

// evaluation matrix of -d/ds V* u' (the hypersingular trace) at a point on an
// element, exact principal-value form
Mat w_trace_rows_exact(const DiscreteSpaces& sp, const LogKernel& hyper,
                       std::size_t mesh_elem, double tau, const AssemblyOptions& opt) {
    const ScalarSet& set = *sp.primal_deriv;
    const Element& host = sp.mesh->elements[mesh_elem];
    const Vec2 x = host.point(tau);
    const Vec2 t_x = host.tangent();
    Mat E = Mat::Zero(2, set.n_vector_dofs());
    for (int e = 0; e < set.n_elems(); ++e) {
        std::optional<double> self_tau;
        if (set.element(e).id == host.id) self_tau = tau;
        const std::vector<Mat2> blocks =
            inner_log_dds_blocks(hyper, set, e, x, t_x, self_tau, opt);
        for (int f = 0; f < set.nfuns(e); ++f) {
            const long g = set.gids[e][f];
            if (g < 0) continue;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) E(i, 2 * g + j) -= blocks[f](i, j);
        }
    }
    return E;
}

// evaluation matrix of (K' + 1/2) phi at a boundary point: (2 x n_density)
Mat adjoint_dl_rows(const DiscreteSpaces& sp, const Material& mat,
                    std::size_t mesh_elem, double tau, const AssemblyOptions& opt) {
    const ScalarSet& set = *sp.density;
    const Element& host = sp.mesh->elements[mesh_elem];
    const Vec2 x = host.point(tau);
    const Vec2 n_x = host.normal();
    Mat E = Mat::Zero(2, set.n_vector_dofs());
    for (int e = 0; e < set.n_elems(); ++e) {
        const bool self = set.element(e).id == host.id;
        const std::vector<Mat2> blocks =
            inner_traction_core_blocks(mat, set, e, x, n_x, self, opt);
        for (int f = 0; f < set.nfuns(e); ++f) {
            const long g = set.gids[e][f];
            if (g < 0) continue;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) E(i, 2 * g + j) -= blocks[f](i, j);
        }
        if (self) {
            for (int f = 0; f < set.nfuns(e); ++f) {
                const long g = set.gids[e][f];
                if (g < 0) continue;
                const double v = 0.5 * set.eval(e, f, tau);
                E(0, 2 * g) += v;
                E(1, 2 * g + 1) += v;
            }
        }
    }
    return E;
}

} // namespace

PointwiseSteklov build_pointwise_steklov(const Mesh& mesh, const DiscreteSpaces& spaces,
                                         const Material& mat, const SteklovOperator& st,
                                         TraceFilter filter, bool exact_w,
                                         const AssemblyOptions& opt, int n_extra,
                                         TraceRule trace_rule) {
    const LogKernel hyper = hypersingular_kernel(mat);
    PointwiseSteklov out;

    // map mesh element -> contact-local index
    std::map<std::size_t, int> contact_local;
    for (int e = 0; e < spaces.multiplier->n_elems(); ++e)
        contact_local[spaces.multiplier->elems[e]] = e;

    for (std::size_t me = 0; me < mesh.elements.size(); ++me) {
        const Element& el = mesh.elements[me];
        if (filter == TraceFilter::ContactOnly && el.part != BoundaryPart::Contact)
            continue;
        // the trace has mild log singularities at the panel joints: the graded
        // rule resolves them where accuracy matters; the Gauss rule keeps the
        // finite-difference stencil inside the element
        const QuadratureRule rule =
            (trace_rule == TraceRule::GradedEnds)
                ? composite_graded_rule(
                      GradedEnd::Both,
                      graded_level_cap(el, opt.graded_levels, opt.graded_sigma),
                      el.p + n_extra, opt.graded_sigma)
                : gauss_rule(el.p + n_extra).mapped_to(0.0, 1.0);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            PointwiseSteklov::Point pt;
            pt.mesh_elem = me;
            pt.tau = rule.nodes[q];
            pt.w_ds = rule.weights[q] * el.length();
            auto it = contact_local.find(me);
            pt.contact_local = (it == contact_local.end()) ? -1 : it->second;
            out.pts.push_back(pt);
        }
    }

    const long npts = static_cast<long>(out.pts.size());
    out.P = Mat::Zero(2 * npts, spaces.n_primal());
    const double fd = 1e-4;
    parallel_for(npts, [&](long lo, long hi) {
        for (long q = lo; q < hi; ++q) {
            const auto& pt = out.pts[q];
            const Element& el = mesh.elements[pt.mesh_elem];
            Mat Wrows;
            const bool fd_fits = pt.tau > 2.0 * fd && pt.tau < 1.0 - 2.0 * fd;
            if (exact_w || !fd_fits) {
                Wrows = w_trace_rows_exact(spaces, hyper, pt.mesh_elem, pt.tau, opt);
            } else {
                const Mat Ep = vstar_prime_rows(spaces, hyper, el.point(pt.tau + fd), opt);
                const Mat Em = vstar_prime_rows(spaces, hyper, el.point(pt.tau - fd), opt);
                Wrows = -(Ep - Em) / (2.0 * fd * el.length());
            }
            const Mat Krows = adjoint_dl_rows(spaces, mat, pt.mesh_elem, pt.tau, opt);
            out.P.middleRows(2 * q, 2) = Wrows + Krows * st.H;
        }
    });
    return out;
}

namespace {

// elementwise integration by parts of the hypersingular pairing against a
// discontinuous test set: <test, W v> = sum_E <test', V* v'>_E - [test^T V* v']_{dE}
Mat ibp_hypersingular(const Mesh& mesh, const DiscreteSpaces& spaces, const Material& mat,
                      const ScalarSet& test_base, const ScalarSet& test_deriv,
                      const AssemblyOptions& opt) {
    const LogKernel hyper = hypersingular_kernel(mat);
    Mat out = assemble_log_galerkin(hyper, test_deriv, *spaces.primal_deriv, opt, false);

    // bracket terms; cache node evaluation matrices
    std::map<std::pair<long, long>, Mat> node_cache;
    auto eval_at = [&](const Vec2& x) -> const Mat& {
        const std::pair<long, long> key(std::lround(x.x() * 1e12), std::lround(x.y() * 1e12));
        auto it = node_cache.find(key);
        if (it == node_cache.end())
            it = node_cache.emplace(key, vstar_prime_rows(spaces, hyper, x, opt)).first;
        return it->second;
    };

    for (int e = 0; e < test_base.n_elems(); ++e) {
        const Element& el = test_base.element(e);
        const Mat& Ea = eval_at(el.a);
        const Mat& Eb = eval_at(el.b);
        for (int f = 0; f < test_base.nfuns(e); ++f) {
            const long g = test_base.gids[e][f];
            if (g < 0) continue;
            const double v0 = test_base.eval(e, f, 0.0);
            const double v1 = test_base.eval(e, f, 1.0);
            for (int i = 0; i < 2; ++i)
                out.row(2 * g + i) -= v1 * Eb.row(i) - v0 * Ea.row(i);
        }
    }
    return out;
}

std::vector<double> contact_weights_for(const ScalarSet& set, const GammaWeight& g,
                                        const MultiplierSet& mult) {
    // per-element weights for `set`: gamma-hat on contact elements, 0 elsewhere
    std::map<long, double> by_id;
    for (int e = 0; e < mult.n_elems(); ++e)
        by_id[mult.element(e).id] = g.per_element[e];
    std::vector<double> w(set.n_elems(), 0.0);
    for (int e = 0; e < set.n_elems(); ++e) {
        auto it = by_id.find(set.element(e).id);
        if (it != by_id.end()) w[e] = it->second;
    }
    return w;
}

} // namespace

StabilizationMatrices build_stabilization(const Mesh& mesh, const DiscreteSpaces& spaces,
                                          const Material& mat, const SteklovOperator& st,
                                          StabilizationMode mode,
                                          const AssemblyOptions& opt, bool exact_w) {
    StabilizationMatrices sm;
    sm.mode = mode;
    const long nU = spaces.n_primal();
    const long nL = spaces.n_multiplier();
    const MultiplierSet& mult = *spaces.multiplier;
    const GammaWeight ghat = build_gamma(mult, 1.0);

    if (mode == StabilizationMode::Off) {
        sm.Stilde = Mat::Zero(nL, nU);
        sm.Shat = Mat::Zero(nU, nU);
        sm.Mgamma = Mat::Zero(nL, nL);
        return sm;
    }

    // Mgamma: gamma-weighted multiplier mass (frames are orthonormal, so the
    // Cartesian-component mass structure carries over to (n,t) components)
    sm.Mgamma = assemble_mass(mult, mult, &ghat.per_element);

    // --- Stilde ---
    // W part by elementwise integration by parts, rows weighted by gamma-hat
    Mat Sw = ibp_hypersingular(mesh, spaces, mat, mult, *spaces.multiplier_deriv, opt);
    for (int e = 0; e < mult.n_elems(); ++e)
        for (int f = 0; f < mult.nfuns(e); ++f) {
            const long g = mult.gids[e][f];
            Sw.row(2 * g) *= ghat.per_element[e];
            Sw.row(2 * g + 1) *= ghat.per_element[e];
        }

    // K' part of the coupling on an end-graded contact quadrature (the adjoint
    // double layer trace of a discontinuous density is log-singular at nodes)
    {
        struct QPt {
            std::size_t mesh_elem;
            int cl;
            double tau, w;
        };
        std::vector<QPt> pts;
        for (int cl = 0; cl < mult.n_elems(); ++cl) {
            const Element& el = mult.element(cl);
            const QuadratureRule rule = composite_graded_rule(
                GradedEnd::Both,
                graded_level_cap(el, opt.graded_levels, opt.graded_sigma),
                el.p + opt.cell_extra, opt.graded_sigma);
            for (std::size_t q = 0; q < rule.size(); ++q)
                pts.push_back({mult.elems[cl], cl, rule.nodes[q],
                               rule.weights[q] * el.length()});
        }
        const long npts = static_cast<long>(pts.size());
        Mat Q = Mat::Zero(2 * npts, nL);
        Vec gw = Vec::Zero(2 * npts);
        Mat PKH = Mat::Zero(2 * npts, nU);
        parallel_for(npts, [&](long lo, long hi) {
            for (long q = lo; q < hi; ++q) {
                const QPt& pt = pts[q];
                const double w = pt.w * ghat.per_element[pt.cl];
                gw[2 * q] = gw[2 * q + 1] = w;
                const Element& el = mult.element(pt.cl);
                const Vec2 n = el.normal(), t = el.tangent();
                for (int f = 0; f < mult.nfuns(pt.cl); ++f) {
                    const long g = mult.gids[pt.cl][f];
                    const double v = mult.eval(pt.cl, f, pt.tau);
                    Q(2 * q + 0, 2 * g) = v * n.x();
                    Q(2 * q + 1, 2 * g) = v * n.y();
                    Q(2 * q + 0, 2 * g + 1) = v * t.x();
                    Q(2 * q + 1, 2 * g + 1) = v * t.y();
                }
                const Mat Krows = adjoint_dl_rows(spaces, mat, pt.mesh_elem, pt.tau, opt);
                PKH.middleRows(2 * q, 2) = Krows * st.H;
            }
        });
        frame_transform_rows(Sw, mult);
        sm.Stilde = Sw + Q.transpose() * gw.asDiagonal() * PKH;
    }

    // --- Shat ---
    if (mode == StabilizationMode::Full) {
        const PointwiseSteklov pw = build_pointwise_steklov(
            mesh, spaces, mat, st, TraceFilter::ContactOnly, exact_w, opt);
        const long npts = static_cast<long>(pw.pts.size());
        Vec gw = Vec::Zero(2 * npts);
        for (long q = 0; q < npts; ++q) {
            const auto& pt = pw.pts[q];
            if (pt.contact_local < 0)
                throw std::logic_error("contact quadrature point off contact");
            const double w = pt.w_ds * ghat.per_element[pt.contact_local];
            gw[2 * q] = gw[2 * q + 1] = w;
        }
        sm.Shat = pw.P.transpose() * gw.asDiagonal() * pw.P;
        sm.Shat = 0.5 * (sm.Shat + sm.Shat.transpose().eval());
    } else {
        // projection approximation: A = M_D^{-1} (Wbar + (Kbar' + 1/2 Mbar) H)
        const DensitySet& aux = *spaces.aux_density;
        const DensityDerivSet aux_deriv(aux);
        const Mat Wbar = ibp_hypersingular(mesh, spaces, mat, aux, aux_deriv, opt);
        const Mat Kbar = assemble_traction_galerkin(mat, aux, *spaces.density, opt, true);
        const Mat Mbar = assemble_mass(aux, *spaces.density);
        const Mat MD = assemble_mass(aux, aux);
        const Mat rhs = Wbar + (Kbar + 0.5 * Mbar) * st.H;
        Eigen::LLT<Mat> md_llt(MD);
        if (md_llt.info() != Eigen::Success)
            throw std::runtime_error("projection mass matrix not SPD");
        const Mat A = md_llt.solve(rhs);
        const std::vector<double> wts = contact_weights_for(aux, ghat, mult);
        const Mat Mg = assemble_mass(aux, aux, &wts);
        sm.Shat = A.transpose() * Mg * A;
        sm.Shat = 0.5 * (sm.Shat + sm.Shat.transpose().eval());
    }
    return sm;
}

Mat rigid_body_functionals(const Mesh& mesh, const DiscreteSpaces& spaces) {
    const ScalarSet& primal = *spaces.primal;
    Mat C = Mat::Zero(3, spaces.n_primal());
    for (int e = 0; e < primal.n_elems(); ++e) {
        const Element& el = primal.element(e);
        const QuadratureRule rule = gauss_rule(el.p / 2 + 2).mapped_to(0.0, 1.0);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double tau = rule.nodes[q];
            const Vec2 x = el.point(tau);
            const Vec2 rho[3] = {Vec2(1.0, 0.0), Vec2(0.0, 1.0), Vec2(x.y(), -x.x())};
            const double w = rule.weights[q] * el.length();
            for (int f = 0; f < primal.nfuns(e); ++f) {
                const long g = primal.gids[e][f];
                if (g < 0) continue;
                const double v = w * primal.eval(e, f, tau);
                for (int k = 0; k < 3; ++k) {
                    C(k, 2 * g) += v * rho[k].x();
                    C(k, 2 * g + 1) += v * rho[k].y();
                }
            }
        }
    }
    return C;
}

double min_eig_sym(const Mat& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()),
                                          Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double min_eig_sym_constrained(const Mat& A, const Mat& C) {
    const long n = A.rows();
    Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
    long r = 0;
    const double tol = 1e-12 * svd.singularValues().maxCoeff();
    for (long i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++r;
    const Mat Z = svd.matrixV().rightCols(n - r);
    return min_eig_sym(Z.transpose() * A * Z);
}

} // namespace hpbem
