#include "hpbem/presets.hpp"

#include <cmath>

namespace hpbem {

namespace {
constexpr double kEdgeTol = 1e-12;
bool on_left(const Vec2& x) { return std::abs(x.x() + 0.5) < kEdgeTol; }
bool on_top(const Vec2& x) { return std::abs(x.y() - 0.5) < kEdgeTol; }
} // namespace

ProblemSpec tresca_square_spec() {
    ProblemSpec spec;
    spec.boundary = std::make_shared<PolygonalBoundary>(
        build_square_boundary(1.0, SquarePreset::TrescaMixed));
    spec.material = Material(500.0, 0.3);
    spec.gap = [](const Vec2& x) {
        return 1.0 - std::sqrt(1.0 - x.x() * x.x() / 100.0);
    };
    spec.friction = TrescaFriction{[](const Vec2& x) { return 0.211 + 0.412 * x.x(); }};
    spec.traction = [](const Vec2& x) -> Vec2 {
        if (on_left(x))
            return {-(0.5 - x.y()) * (-0.5 - x.y()), 0.0};
        if (on_top(x) && x.x() <= -0.25)
            return {0.0, 20.0 * (-0.5 - x.x()) * (-0.25 - x.x())};
        return Vec2::Zero();
    };
    return spec;
}

ProblemSpec coulomb_square_spec() {
    ProblemSpec spec;
    spec.boundary = std::make_shared<PolygonalBoundary>(
        build_square_boundary(1.0, SquarePreset::CoulombNeumann));
    spec.material = Material(5.0, 0.45);
    spec.gap = [](const Vec2&) { return 0.0; };
    spec.friction = CoulombFriction{0.3};
    spec.traction = [](const Vec2& x) -> Vec2 {
        if (on_top(x))
            return {0.0, -12.5 * (0.5 - x.x()) * (0.5 - x.x()) * (0.5 + x.x()) * (0.5 + x.x())};
        if (std::abs(std::abs(x.x()) - 0.5) < kEdgeTol) {
            const double sgn = (x.x() > 0.0) ? 1.0 : -1.0;
            const double bump = (0.5 + x.y()) * (0.5 - x.y());
            const double ex = std::exp(-10.0 * (x.y() + 0.4) * (x.y() + 0.4));
            return {-10.0 * sgn * bump * ex, 0.875 * bump};
        }
        return Vec2::Zero();
    };
    return spec;
}

ProblemSpec scale_traction(const ProblemSpec& spec, double factor) {
    ProblemSpec out = spec;
    auto base = spec.traction;
    out.traction = [base, factor](const Vec2& x) -> Vec2 { return factor * base(x); };
    return out;
}

} // namespace hpbem
