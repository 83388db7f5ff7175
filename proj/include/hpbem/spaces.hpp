#pragma once

#include "hpbem/basis.hpp"
#include "hpbem/geometry.hpp"
#include "hpbem/types.hpp"

#include <memory>
#include <vector>

namespace hpbem {

/// A family of scalar shape functions per element, with global scalar DOF ids.
/// Vector DOFs are derived as 2*scalar_id + component. Functions are given in
/// the reference coordinate tau of each element; integrals carry ds = h dtau.
class ScalarSet {
public:
    const Mesh* mesh = nullptr;
    std::vector<std::size_t> elems;           // mesh element indices
    std::vector<std::vector<long>> gids;      // [local elem][fn] -> scalar id, -1 = eliminated
    long n_scalar = 0;

    virtual ~ScalarSet() = default;
    virtual int nfuns(int e) const = 0;
    virtual double eval(int e, int f, double tau) const = 0;
    /// monomial coefficients, row f: function f as polynomial in tau
    virtual const Mat& mono(int e) const = 0;

    const Element& element(int e) const { return mesh->elements[elems[e]]; }
    int n_elems() const { return static_cast<int>(elems.size()); }
    long n_vector_dofs() const { return 2 * n_scalar; }
};

/// Continuous piecewise-polynomial trace space on Gamma_Sigma (nodal basis at
/// GLL points of degree p_E). On an open curve the two terminal endpoint DOFs
/// are eliminated (zero trace toward the Dirichlet part).
class PrimalTraceSet : public ScalarSet {
public:
    PrimalTraceSet(const Mesh& mesh);
    int nfuns(int e) const override;
    double eval(int e, int f, double tau) const override;
    const Mat& mono(int e) const override;

    const NodalBasis& local_basis(int e) const;
    double eval_deriv(int e, int f, double tau) const;

private:
    std::vector<std::shared_ptr<NodalBasis>> bases_;
    std::vector<Mat> monos_;
};

/// Element-by-element derivative functions d/ds of the primal trace set
/// (same global ids, values scaled by 1/h_E).
class PrimalDerivSet : public ScalarSet {
public:
    explicit PrimalDerivSet(const PrimalTraceSet& trace);
    int nfuns(int e) const override;
    double eval(int e, int f, double tau) const override;
    const Mat& mono(int e) const override;

private:
    const PrimalTraceSet* trace_;
    std::vector<Mat> monos_;
};

/// Discontinuous Legendre functions of degree p_E + offset on every element
/// (offset = -1 gives the single-layer density space, +1 the projection space).
class DensitySet : public ScalarSet {
public:
    DensitySet(const Mesh& mesh, int degree_offset);
    int nfuns(int e) const override;
    double eval(int e, int f, double tau) const override;
    const Mat& mono(int e) const override;

private:
    std::vector<int> degs_;
    std::vector<Mat> monos_;
};

/// Multiplier scalar functions on the contact elements (Bernstein or GLL
/// Lagrange of degree q_E = p_E), with per-element frames and control points.
class MultiplierSet : public ScalarSet {
public:
    MultiplierSet(const Mesh& mesh, BasisKind kind);
    int nfuns(int e) const override;
    double eval(int e, int f, double tau) const override;
    const Mat& mono(int e) const override;

    double eval_deriv(int e, int f, double tau) const;
    BasisKind kind() const { return kind_; }
    /// control point of function f on local element e, in reference coords
    double control_tau(int e, int f) const;
    Vec2 control_point(int e, int f) const;

private:
    BasisKind kind_;
    std::vector<int> degs_;
    std::vector<std::shared_ptr<NodalBasis>> gll_bases_;
    std::vector<Mat> monos_;
};

/// Derivative functions d/ds of a Legendre density set (same ids).
class DensityDerivSet : public ScalarSet {
public:
    explicit DensityDerivSet(const DensitySet& base);
    int nfuns(int e) const override;
    double eval(int e, int f, double tau) const override;
    const Mat& mono(int e) const override;

private:
    const DensitySet* base_;
    std::vector<Mat> monos_;
};

/// Derivative functions of the multiplier set (same ids, d/ds scaling).
class MultiplierDerivSet : public ScalarSet {
public:
    explicit MultiplierDerivSet(const MultiplierSet& m);
    int nfuns(int e) const override;
    double eval(int e, int f, double tau) const override;
    const Mat& mono(int e) const override;

private:
    const MultiplierSet* mult_;
    std::vector<Mat> monos_;
};

/// All discrete spaces over one mesh.
struct DiscreteSpaces {
    const Mesh* mesh = nullptr;
    std::shared_ptr<PrimalTraceSet> primal;
    std::shared_ptr<PrimalDerivSet> primal_deriv;
    std::shared_ptr<DensitySet> density;      // degree p_E - 1
    std::shared_ptr<DensitySet> aux_density;  // degree p_E + 1
    std::shared_ptr<MultiplierSet> multiplier;
    std::shared_ptr<MultiplierDerivSet> multiplier_deriv;

    long n_primal() const { return primal->n_vector_dofs(); }
    long n_density() const { return density->n_vector_dofs(); }
    long n_multiplier() const { return multiplier->n_vector_dofs(); }

    /// Evaluate the primal field on element e (mesh index) at tau.
    Vec2 primal_value(const Vec& u, std::size_t mesh_elem, double tau) const;
    /// Evaluate the multiplier field (Cartesian) on contact element e at tau.
    Vec2 multiplier_value(const Vec& lam, std::size_t mesh_elem, double tau) const;
    /// Normal/tangential multiplier components at tau on a contact element.
    Vec2 multiplier_nt(const Vec& lam, std::size_t mesh_elem, double tau) const;
};

DiscreteSpaces build_spaces(const Mesh& mesh, BasisKind kind);

} // namespace hpbem
