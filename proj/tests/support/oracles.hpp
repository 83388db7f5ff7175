#pragma once

#include "hpbem/geometry.hpp"
#include "hpbem/kernels.hpp"
#include "hpbem/spaces.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace hpbem::testing {

/// Adaptive Gauss(7)/Kronrod-style quadrature by interval bisection. Handles
/// integrable endpoint singularities through depth-limited local refinement.
/// Independent of the production quadrature (fixed 7/15 point pair).
class AdaptiveQuad {
public:
    double tol = 1e-12;
    int max_depth = 52;

    double integrate(const std::function<double(double)>& f, double a, double b) const {
        return refine(f, a, b, coarse(f, a, b), 0);
    }

private:
    static double coarse(const std::function<double(double)>& f, double a, double b) {
        // 7-point Gauss
        static const double xs[7] = {-0.9491079123427585, -0.7415311855993945,
                                     -0.4058451513773972, 0.0,
                                     0.4058451513773972,  0.7415311855993945,
                                     0.9491079123427585};
        static const double ws[7] = {0.1294849661688697, 0.2797053914892766,
                                     0.3818300505051189, 0.4179591836734694,
                                     0.3818300505051189, 0.2797053914892766,
                                     0.1294849661688697};
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (int i = 0; i < 7; ++i) s += ws[i] * f(c + h * xs[i]);
        return s * h;
    }

    double refine(const std::function<double(double)>& f, double a, double b,
                  double whole, int depth) const {
        const double c = 0.5 * (a + b);
        const double left = coarse(f, a, c);
        const double right = coarse(f, c, b);
        const double delta = left + right - whole;
        if (depth >= max_depth || std::abs(delta) < tol * (1.0 + std::abs(left + right)))
            return left + right + delta / 15.0;
        return refine(f, a, c, left, depth + 1) + refine(f, c, b, right, depth + 1);
    }
};

/// Oracle Galerkin entry: iint over two elements of
/// test_f(x) * kernel_{ij}(x, y) * trial_f(y), by nested adaptive quadrature.
/// For coincident elements the integrand must be integrable (log-type kernels).
inline double oracle_galerkin_entry(
    const Element& ex, const std::function<double(double)>& test_f, const Element& ey,
    const std::function<double(double)>& trial_f,
    const std::function<double(const Vec2&, const Vec2&)>& kernel_ij,
    double tol = 1e-12) {
    AdaptiveQuad inner;
    inner.tol = tol;
    AdaptiveQuad outer;
    outer.tol = tol * 10.0;
    const double hx = ex.length(), hy = ey.length();
    const bool same = (ex.a - ey.a).norm() < 1e-14 && (ex.b - ey.b).norm() < 1e-14;
    auto inner_at = [&](double tx) {
        const Vec2 x = ex.point(tx);
        auto g = [&](double ty) {
            return trial_f(ty) * kernel_ij(x, ey.point(ty)) * hy;
        };
        if (same) {
            // split at the (integrable) singular point
            return inner.integrate(g, 0.0, tx) + inner.integrate(g, tx, 1.0);
        }
        return inner.integrate(g, 0.0, 1.0);
    };
    return outer.integrate([&](double tx) { return test_f(tx) * inner_at(tx) * hx; },
                           0.0, 1.0);
}

/// Scalar basis adapters for the oracle.
inline std::function<double(double)> set_fn(const ScalarSet& set, int e, int f) {
    return [&set, e, f](double tau) { return set.eval(e, f, tau); };
}

} // namespace hpbem::testing
