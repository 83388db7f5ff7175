#include "hpbem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hpbem {

QuadratureRule QuadratureRule::mapped_to(double a, double b) const {
    QuadratureRule out;
    out.exactness = exactness;
    out.lo = a;
    out.hi = b;
    const double scale = (b - a) / (hi - lo);
    out.nodes.reserve(nodes.size());
    out.weights.reserve(weights.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out.nodes.push_back(a + (nodes[i] - lo) * scale);
        out.weights.push_back(weights[i] * scale);
    }
    return out;
}

namespace {

// Legendre polynomial value and derivative at x.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return {1.0, 0.0};
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

QuadratureRule make_gauss(int n) {
    QuadratureRule rule;
    rule.exactness = 2 * n - 1;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, Newton refinement.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            auto [p, dp] = legendre(n, x);
            double dx = -p / dp;
            x += dx;
            if (std::abs(dx) < 1e-16) break;
        }
        auto [p, dp] = legendre(n, x);
        (void)p;
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // sort ascending (cos gives descending)
    for (int i = 0; i < n / 2; ++i) {
        std::swap(rule.nodes[i], rule.nodes[n - 1 - i]);
        std::swap(rule.weights[i], rule.weights[n - 1 - i]);
    }
    return rule;
}

QuadratureRule make_gll(int q) {
    const int n = q + 1; // node count
    QuadratureRule rule;
    rule.exactness = 2 * q - 1;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.nodes[0] = -1.0;
    rule.nodes[n - 1] = 1.0;
    // interior nodes: roots of P'_q, found by Newton from Chebyshev-Lobatto guesses
    for (int i = 1; i < n - 1; ++i) {
        double x = -std::cos(M_PI * i / q);
        for (int it = 0; it < 100; ++it) {
            auto [p, dp] = legendre(q, x);
            // second derivative from the ODE (1-x^2) P'' - 2x P' + q(q+1) P = 0
            double d2p = (2.0 * x * dp - q * (q + 1.0) * p) / (1.0 - x * x);
            double dx = -dp / d2p;
            x += dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
    }
    for (int i = 0; i < n; ++i) {
        auto [p, dp] = legendre(q, rule.nodes[i]);
        (void)dp;
        rule.weights[i] = 2.0 / (q * (q + 1.0) * p * p);
    }
    return rule;
}

std::mutex g_cache_mutex;
std::map<int, QuadratureRule> g_gauss_cache;
std::map<int, QuadratureRule> g_gll_cache;

} // namespace

const QuadratureRule& gauss_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_rule: n >= 1 required");
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_gauss_cache.find(n);
    if (it == g_gauss_cache.end())
        it = g_gauss_cache.emplace(n, make_gauss(n)).first;
    return it->second;
}

const QuadratureRule& gll_rule(int q) {
    if (q < 1) throw std::invalid_argument("gll_rule: q >= 1 required");
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_gll_cache.find(q);
    if (it == g_gll_cache.end())
        it = g_gll_cache.emplace(q, make_gll(q)).first;
    return it->second;
}

QuadratureRule gauss_rule_01(int n) { return gauss_rule(n).mapped_to(0.0, 1.0); }

QuadratureRule composite_graded_rule(GradedEnd end, int levels, int n_per_cell,
                                     double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::invalid_argument("composite_graded_rule: sigma in (0,1)");
    if (levels < 1) throw std::invalid_argument("composite_graded_rule: levels >= 1");

    if (end == GradedEnd::Both) {
        // grade toward 0 on [0,1/2] and toward 1 on [1/2,1]
        QuadratureRule left = composite_graded_rule(GradedEnd::Left, levels, n_per_cell, sigma);
        QuadratureRule right = composite_graded_rule(GradedEnd::Right, levels, n_per_cell, sigma);
        QuadratureRule out;
        out.lo = 0.0;
        out.hi = 1.0;
        out.exactness = left.exactness;
        QuadratureRule lm = left.mapped_to(0.0, 0.5);
        QuadratureRule rm = right.mapped_to(0.5, 1.0);
        out.nodes = lm.nodes;
        out.weights = lm.weights;
        out.nodes.insert(out.nodes.end(), rm.nodes.begin(), rm.nodes.end());
        out.weights.insert(out.weights.end(), rm.weights.begin(), rm.weights.end());
        return out;
    }

    // keep the innermost cell above machine resolution; nodes closer than
    // ~1e-12 to the singular endpoint destabilize the panel geometry tests
    const int level_cap = static_cast<int>(std::floor(std::log(1e-10) / std::log(sigma)));
    levels = std::min(levels, std::max(1, level_cap));

    QuadratureRule out;
    out.lo = 0.0;
    out.hi = 1.0;
    out.exactness = 2 * n_per_cell - 1;
    auto add_cell = [&](double a, double b, int n) {
        QuadratureRule cell = gauss_rule(n).mapped_to(a, b);
        out.nodes.insert(out.nodes.end(), cell.nodes.begin(), cell.nodes.end());
        out.weights.insert(out.weights.end(), cell.weights.begin(), cell.weights.end());
    };
    // cells toward 0: [sigma^{j+1}, sigma^j], j = 0..levels-1, plus [0, sigma^levels];
    // the order grows linearly away from the singular end (hp-composite rule)
    double hi = 1.0;
    for (int j = 0; j < levels; ++j) {
        double lo = hi * sigma;
        add_cell(lo, hi, n_per_cell + (levels - j));
        hi = lo;
    }
    add_cell(0.0, hi, n_per_cell);
    if (end == GradedEnd::Right) {
        // mirror
        for (auto& x : out.nodes) x = 1.0 - x;
    }
    return out;
}

} // namespace hpbem
