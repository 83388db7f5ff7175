#pragma once

#include <vector>

namespace hpbem {

/// 1D quadrature rule. Nodes live on the interval given by `lo`, `hi`
/// (either [-1,1] for the raw Gauss tables or [0,1] after mapping).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int exactness = 0; // exact for polynomials up to this degree
    double lo = -1.0, hi = 1.0;

    std::size_t size() const { return nodes.size(); }

    /// Affinely map the rule onto [a, b].
    QuadratureRule mapped_to(double a, double b) const;
};

/// n-point Gauss-Legendre rule on [-1,1], exactness 2n-1. Cached.
const QuadratureRule& gauss_rule(int n);

/// Gauss-Lobatto rule with q+1 nodes on [-1,1] (endpoints included),
/// exactness 2q-1. Cached.
const QuadratureRule& gll_rule(int q);

/// Gauss rule mapped to [0,1].
QuadratureRule gauss_rule_01(int n);

enum class GradedEnd { Left, Right, Both };

/// Composite rule on [0,1] with geometric grading (ratio sigma) toward the
/// singular endpoint(s): cells [sigma^{j+1}, sigma^j] plus the innermost
/// remainder, a Gauss rule of n_per_cell points per cell.
QuadratureRule composite_graded_rule(GradedEnd end, int levels, int n_per_cell,
                                     double sigma);

} // namespace hpbem
