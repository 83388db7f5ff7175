#include "hpbem/spaces.hpp"

#include <map>
#include <stdexcept>

namespace hpbem {

namespace {
Mat deriv_mono(const Mat& mono, double h) {
    // d/ds of a polynomial given by monomial rows; result has one column less
    // (padded to same size) and carries the 1/h arclength scaling.
    Mat out = Mat::Zero(mono.rows(), mono.cols());
    for (Index f = 0; f < mono.rows(); ++f)
        for (Index k = 1; k < mono.cols(); ++k)
            out(f, k - 1) = mono(f, k) * double(k) / h;
    return out;
}
} // namespace

// ------------------------------------------------------------- PrimalTraceSet
PrimalTraceSet::PrimalTraceSet(const Mesh& mesh) {
    this->mesh = &mesh;
    const std::size_t ne = mesh.elements.size();
    elems.resize(ne);
    for (std::size_t i = 0; i < ne; ++i) elems[i] = i;

    std::map<int, std::shared_ptr<NodalBasis>> basis_cache;
    bases_.resize(ne);
    monos_.resize(ne);
    for (std::size_t i = 0; i < ne; ++i) {
        const int p = mesh.elements[i].p;
        auto it = basis_cache.find(p);
        if (it == basis_cache.end()) {
            auto nb = std::make_shared<NodalBasis>(gll_points_01(p));
            it = basis_cache.emplace(p, nb).first;
        }
        bases_[i] = it->second;
        monos_[i] = nodal_monomial_coeffs(*bases_[i]);
    }

    // global numbering: curve nodes shared, interior nodes element-local.
    const bool closed = mesh.closed_curve();
    const long n_nodes = static_cast<long>(ne) + (closed ? 0 : 1);
    std::vector<long> node_gid(n_nodes, -1);
    long next = 0;
    for (long k = 0; k < n_nodes; ++k) {
        const bool terminal = !closed && (k == 0 || k == n_nodes - 1);
        node_gid[k] = terminal ? -1 : next++;
    }
    gids.resize(ne);
    for (std::size_t i = 0; i < ne; ++i) {
        const int p = mesh.elements[i].p;
        gids[i].assign(p + 1, -1);
        const long left_node = static_cast<long>(i);
        const long right_node = closed ? (static_cast<long>(i) + 1) % static_cast<long>(ne)
                                       : static_cast<long>(i) + 1;
        gids[i][0] = node_gid[left_node];
        gids[i][p] = node_gid[right_node];
        for (int f = 1; f < p; ++f) gids[i][f] = next++;
    }
    n_scalar = next;
}

int PrimalTraceSet::nfuns(int e) const { return element(e).p + 1; }
double PrimalTraceSet::eval(int e, int f, double tau) const { return bases_[e]->eval(f, tau); }
const Mat& PrimalTraceSet::mono(int e) const { return monos_[e]; }
const NodalBasis& PrimalTraceSet::local_basis(int e) const { return *bases_[e]; }
double PrimalTraceSet::eval_deriv(int e, int f, double tau) const {
    return bases_[e]->derivative(f, tau);
}

// ------------------------------------------------------------- PrimalDerivSet
PrimalDerivSet::PrimalDerivSet(const PrimalTraceSet& trace) : trace_(&trace) {
    mesh = trace.mesh;
    elems = trace.elems;
    gids = trace.gids;
    n_scalar = trace.n_scalar;
    monos_.resize(elems.size());
    for (int e = 0; e < n_elems(); ++e)
        monos_[e] = deriv_mono(trace.mono(e), element(e).length());
}

int PrimalDerivSet::nfuns(int e) const { return trace_->nfuns(e); }
double PrimalDerivSet::eval(int e, int f, double tau) const {
    return trace_->eval_deriv(e, f, tau) / element(e).length();
}
const Mat& PrimalDerivSet::mono(int e) const { return monos_[e]; }

// ----------------------------------------------------------------- DensitySet
DensitySet::DensitySet(const Mesh& mesh, int degree_offset) {
    this->mesh = &mesh;
    const std::size_t ne = mesh.elements.size();
    elems.resize(ne);
    for (std::size_t i = 0; i < ne; ++i) elems[i] = i;
    degs_.resize(ne);
    monos_.resize(ne);
    gids.resize(ne);
    long next = 0;
    for (std::size_t i = 0; i < ne; ++i) {
        const int d = mesh.elements[i].p + degree_offset;
        if (d < 0) throw std::invalid_argument("DensitySet: negative degree");
        degs_[i] = d;
        monos_[i] = legendre01_monomial_coeffs(d);
        gids[i].resize(d + 1);
        for (int f = 0; f <= d; ++f) gids[i][f] = next++;
    }
    n_scalar = next;
}

int DensitySet::nfuns(int e) const { return degs_[e] + 1; }
double DensitySet::eval(int e, int f, double tau) const { return legendre01_eval(f, tau); }
const Mat& DensitySet::mono(int e) const { return monos_[e]; }

// ------------------------------------------------------------ DensityDerivSet
DensityDerivSet::DensityDerivSet(const DensitySet& base) : base_(&base) {
    mesh = base.mesh;
    elems = base.elems;
    gids = base.gids;
    n_scalar = base.n_scalar;
    monos_.resize(elems.size());
    for (int e = 0; e < n_elems(); ++e)
        monos_[e] = deriv_mono(base.mono(e), element(e).length());
}

int DensityDerivSet::nfuns(int e) const { return base_->nfuns(e); }
double DensityDerivSet::eval(int e, int f, double tau) const {
    return legendre01_derivative(f, tau) / element(e).length();
}
const Mat& DensityDerivSet::mono(int e) const { return monos_[e]; }

// -------------------------------------------------------------- MultiplierSet
MultiplierSet::MultiplierSet(const Mesh& mesh, BasisKind kind) : kind_(kind) {
    this->mesh = &mesh;
    elems = mesh.contact_elements();
    const int ne = n_elems();
    degs_.resize(ne);
    monos_.resize(ne);
    gll_bases_.resize(ne);
    gids.resize(ne);
    long next = 0;
    std::map<int, std::shared_ptr<NodalBasis>> cache;
    for (int e = 0; e < ne; ++e) {
        const int q = element(e).p; // multiplier degree equals the primal degree
        degs_[e] = q;
        if (kind_ == BasisKind::GLL) {
            auto it = cache.find(q);
            if (it == cache.end())
                it = cache.emplace(q, std::make_shared<NodalBasis>(gll_points_01(q))).first;
            gll_bases_[e] = it->second;
            monos_[e] = nodal_monomial_coeffs(*gll_bases_[e]);
        } else {
            monos_[e] = bernstein_monomial_coeffs(q);
        }
        gids[e].resize(q + 1);
        for (int f = 0; f <= q; ++f) gids[e][f] = next++;
    }
    n_scalar = next;
}

int MultiplierSet::nfuns(int e) const { return degs_[e] + 1; }

double MultiplierSet::eval(int e, int f, double tau) const {
    if (kind_ == BasisKind::GLL) return gll_bases_[e]->eval(f, tau);
    return bernstein_eval(f, degs_[e], tau);
}

const Mat& MultiplierSet::mono(int e) const { return monos_[e]; }

double MultiplierSet::eval_deriv(int e, int f, double tau) const {
    if (kind_ == BasisKind::GLL) return gll_bases_[e]->derivative(f, tau);
    return bernstein_derivative(f, degs_[e], tau);
}

double MultiplierSet::control_tau(int e, int f) const {
    if (kind_ == BasisKind::GLL) return gll_bases_[e]->nodes()[f];
    return double(f) / double(degs_[e] == 0 ? 1 : degs_[e]);
}

Vec2 MultiplierSet::control_point(int e, int f) const {
    return element(e).point(control_tau(e, f));
}

// --------------------------------------------------------- MultiplierDerivSet
MultiplierDerivSet::MultiplierDerivSet(const MultiplierSet& m) : mult_(&m) {
    mesh = m.mesh;
    elems = m.elems;
    gids = m.gids;
    n_scalar = m.n_scalar;
    monos_.resize(elems.size());
    for (int e = 0; e < n_elems(); ++e)
        monos_[e] = deriv_mono(m.mono(e), element(e).length());
}

int MultiplierDerivSet::nfuns(int e) const { return mult_->nfuns(e); }
double MultiplierDerivSet::eval(int e, int f, double tau) const {
    return mult_->eval_deriv(e, f, tau) / element(e).length();
}
const Mat& MultiplierDerivSet::mono(int e) const { return monos_[e]; }

// -------------------------------------------------------------- DiscreteSpaces
Vec2 DiscreteSpaces::primal_value(const Vec& u, std::size_t mesh_elem, double tau) const {
    const int e = static_cast<int>(mesh_elem); // primal covers all elements in order
    Vec2 out = Vec2::Zero();
    for (int f = 0; f < primal->nfuns(e); ++f) {
        const long g = primal->gids[e][f];
        if (g < 0) continue;
        const double v = primal->eval(e, f, tau);
        out.x() += v * u[2 * g];
        out.y() += v * u[2 * g + 1];
    }
    return out;
}

Vec2 DiscreteSpaces::multiplier_value(const Vec& lam, std::size_t mesh_elem, double tau) const {
    Vec2 nt = multiplier_nt(lam, mesh_elem, tau);
    // locate local index
    for (int e = 0; e < multiplier->n_elems(); ++e) {
        if (multiplier->elems[e] == mesh_elem) {
            const Element& el = multiplier->element(e);
            return nt.x() * el.normal() + nt.y() * el.tangent();
        }
    }
    throw std::invalid_argument("multiplier_value: element not on contact boundary");
}

Vec2 DiscreteSpaces::multiplier_nt(const Vec& lam, std::size_t mesh_elem, double tau) const {
    for (int e = 0; e < multiplier->n_elems(); ++e) {
        if (multiplier->elems[e] == mesh_elem) {
            Vec2 out = Vec2::Zero();
            for (int f = 0; f < multiplier->nfuns(e); ++f) {
                const long g = multiplier->gids[e][f];
                const double v = multiplier->eval(e, f, tau);
                out.x() += v * lam[2 * g];     // normal component
                out.y() += v * lam[2 * g + 1]; // tangential component
            }
            return out;
        }
    }
    throw std::invalid_argument("multiplier_nt: element not on contact boundary");
}

DiscreteSpaces build_spaces(const Mesh& mesh, BasisKind kind) {
    DiscreteSpaces sp;
    sp.mesh = &mesh;
    sp.primal = std::make_shared<PrimalTraceSet>(mesh);
    sp.primal_deriv = std::make_shared<PrimalDerivSet>(*sp.primal);
    sp.density = std::make_shared<DensitySet>(mesh, -1);
    sp.aux_density = std::make_shared<DensitySet>(mesh, +1);
    sp.multiplier = std::make_shared<MultiplierSet>(mesh, kind);
    sp.multiplier_deriv = std::make_shared<MultiplierDerivSet>(*sp.multiplier);
    return sp;
}

} // namespace hpbem
