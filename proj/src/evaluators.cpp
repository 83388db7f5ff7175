#include "hpbem/evaluators.hpp"

#include <stdexcept>

namespace hpbem {

PotentialEvaluator::PotentialEvaluator(const Mesh& mesh, const DiscreteSpaces& spaces,
                                       const Material& mat, const AssemblyOptions& opt)
    : mesh_(&mesh), sp_(&spaces), mat_(mat), opt_(opt),
      fund_(fundamental_kernel(mat)), hyper_(hypersingular_kernel(mat)) {}

namespace {
inline Vec2 contract(const std::vector<Mat2>& blocks, const ScalarSet& set, int e,
                     const Vec& c) {
    Vec2 out = Vec2::Zero();
    for (int f = 0; f < set.nfuns(e); ++f) {
        const long g = set.gids[e][f];
        if (g < 0) continue;
        out += blocks[f] * Vec2(c[2 * g], c[2 * g + 1]);
    }
    return out;
}
} // namespace

Vec2 PotentialEvaluator::log_potential(const LogKernel& ker, const ScalarSet& set,
                                       const Vec& c, const Vec2& x) const {
    Vec2 out = Vec2::Zero();
    for (int e = 0; e < set.n_elems(); ++e)
        out += contract(inner_log_blocks(ker, set, e, x, opt_), set, e, c);
    return out;
}

Vec2 PotentialEvaluator::log_potential_dds(const LogKernel& ker, const ScalarSet& set,
                                           const Vec& c, std::size_t mesh_elem,
                                           double tau) const {
    const Element& host = mesh_->elements[mesh_elem];
    const Vec2 x = host.point(tau);
    const Vec2 t_x = host.tangent();
    Vec2 out = Vec2::Zero();
    for (int e = 0; e < set.n_elems(); ++e) {
        std::optional<double> self_tau;
        if (set.element(e).id == host.id) self_tau = tau;
        out += contract(inner_log_dds_blocks(ker, set, e, x, t_x, self_tau, opt_),
                        set, e, c);
    }
    return out;
}

Vec2 PotentialEvaluator::adjoint_double_layer(const ScalarSet& set, const Vec& c,
                                              std::size_t mesh_elem, double tau) const {
    const Element& host = mesh_->elements[mesh_elem];
    const Vec2 x = host.point(tau);
    const Vec2 n_x = host.normal();
    Vec2 out = Vec2::Zero();
    for (int e = 0; e < set.n_elems(); ++e) {
        const bool self = set.element(e).id == host.id;
        std::vector<Mat2> blocks =
            inner_traction_core_blocks(mat_, set, e, x, n_x, self, opt_);
        for (int f = 0; f < set.nfuns(e); ++f) {
            const long g = set.gids[e][f];
            if (g < 0) continue;
            out += (-blocks[f]) * Vec2(c[2 * g], c[2 * g + 1]);
        }
    }
    return out;
}

Vec2 PotentialEvaluator::double_layer_dds(const ScalarSet& primal, const Vec& u,
                                          std::size_t mesh_elem, double tau) const {
    const Element& host = mesh_->elements[mesh_elem];
    const Vec2 x = host.point(tau);
    const Vec2 t_x = host.tangent();
    Vec2 out = Vec2::Zero();
    for (int e = 0; e < primal.n_elems(); ++e) {
        const bool self = primal.element(e).id == host.id;
        std::vector<Mat2> blocks = inner_traction_dds_blocks(
            mat_, primal, e, x, primal.element(e).normal(), t_x, self, opt_);
        for (auto& B : blocks) B.transposeInPlace(); // double layer integrand = core^T
        out += contract(blocks, primal, e, u);
    }
    return out;
}

Vec2 PotentialEvaluator::single_layer(const Vec& psi, const Vec2& x) const {
    return log_potential(fund_, *sp_->density, psi, x);
}

Vec2 PotentialEvaluator::single_layer_dds(const Vec& psi, std::size_t mesh_elem,
                                          double tau) const {
    return log_potential_dds(fund_, *sp_->density, psi, mesh_elem, tau);
}

Vec2 PotentialEvaluator::vstar_prime(const Vec& u, const Vec2& x) const {
    return log_potential(hyper_, *sp_->primal_deriv, u, x);
}

Vec2 PotentialEvaluator::steklov_trace(const Vec& u, const Vec& eta,
                                       std::size_t mesh_elem, double tau,
                                       bool exact_w) const {
    const Element& host = mesh_->elements[mesh_elem];
    Vec2 w_part;
    if (exact_w) {
        w_part = -log_potential_dds(hyper_, *sp_->primal_deriv, u, mesh_elem, tau);
    } else {
        if (tau - fd_step <= 0.0 || tau + fd_step >= 1.0)
            throw std::invalid_argument("steklov_trace: tau too close to an endpoint "
                                        "for the finite-difference step");
        const Vec2 plus = vstar_prime(u, host.point(tau + fd_step));
        const Vec2 minus = vstar_prime(u, host.point(tau - fd_step));
        w_part = -(plus - minus) / (2.0 * fd_step * host.length());
    }
    const Vec2 k_part = adjoint_double_layer(*sp_->density, eta, mesh_elem, tau);
    const Vec2 half = 0.5 * density_value(*sp_->density, eta, mesh_elem, tau);
    return w_part + k_part + half;
}

Vec2 PotentialEvaluator::density_value(const ScalarSet& set, const Vec& c,
                                       std::size_t mesh_elem, double tau) const {
    for (int e = 0; e < set.n_elems(); ++e) {
        if (set.elems[e] != mesh_elem) continue;
        Vec2 out = Vec2::Zero();
        for (int f = 0; f < set.nfuns(e); ++f) {
            const long g = set.gids[e][f];
            if (g < 0) continue;
            out += set.eval(e, f, tau) * Vec2(c[2 * g], c[2 * g + 1]);
        }
        return out;
    }
    throw std::invalid_argument("density_value: element not in set");
}

} // namespace hpbem
