#include "hpbem/estimator.hpp"
#include "hpbem/presets.hpp"

#include <doctest.h>

using namespace hpbem;

namespace {

struct Solved {
    ProblemSpec spec;
    Mesh mesh;
    DiscreteSpaces spaces;
    SteklovOperator st;
    StabilizationMatrices stab;
    DiscreteSolution sol;

    explicit Solved(int n_per_unit = 4, BasisKind kind = BasisKind::Bernstein,
                    bool coulomb = false, double gamma0 = 1e-3) {
        spec = coulomb ? coulomb_square_spec() : tresca_square_spec();
        spec.gamma0 = gamma0;
        spec.basis = kind;
        mesh = initial_mesh(spec.boundary, n_per_unit, 1);
        spaces = build_spaces(mesh, kind);
        st = build_steklov(mesh, spaces, spec.material);
        stab = build_stabilization(mesh, spaces, spec.material, st, spec.stab_mode);
        sol = solve_problem(spec, mesh, spaces, st, stab);
    }
};

} // namespace

TEST_CASE("estimator terms: signs, weights and the div-10 flag") {
    Solved s(4);
    EstimatorOptions eopt;
    const ErrorBreakdown err = estimate_error(s.sol, s.spec, s.mesh, s.spaces, s.st, eopt);

    // all terms nonnegative up to roundoff
    for (const Vec* term : {&err.neumann, &err.contact, &err.density, &err.compl_n,
                            &err.penetration, &err.sign_n, &err.friction, &err.stick})
        CHECK(term->minCoeff() > -1e-12 * (1.0 + std::abs(term->maxCoeff())));

    // neumann term lives on Neumann elements only, contact terms on contact
    for (std::size_t i = 0; i < s.mesh.size(); ++i) {
        if (s.mesh.elements[i].part == BoundaryPart::Contact)
            CHECK(err.neumann[(long)i] == 0.0);
        else
            CHECK(err.contact[(long)i] == 0.0);
    }

    // the div-10 flag scales exactly the residual terms
    EstimatorOptions raw = eopt;
    raw.residual_div10 = false;
    const ErrorBreakdown err_raw =
        estimate_error(s.sol, s.spec, s.mesh, s.spaces, s.st, raw);
    const double lhs = err.element_eta2().sum();
    const double rhs = 0.1 * (err_raw.neumann + err_raw.contact + err_raw.density).sum() +
                       (err_raw.compl_n + err_raw.penetration + err_raw.sign_n +
                        err_raw.friction + err_raw.stick)
                           .sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("conforming bernstein mode: nonconformity terms vanish") {
    Solved s(4, BasisKind::Bernstein);
    EstimatorOptions eopt;
    const ErrorBreakdown err = estimate_error(s.sol, s.spec, s.mesh, s.spaces, s.st, eopt);
    const double scale = err.element_eta2().sum();
    CHECK(err.sign_n.sum() <= 1e-14 * scale);
    CHECK(err.friction.sum() <= 1e-14 * scale);

    // simplified (corollary) form agrees with the general form when conforming
    EstimatorOptions simp = eopt;
    simp.corollary_form = true;
    const ErrorBreakdown err2 =
        estimate_error(s.sol, s.spec, s.mesh, s.spaces, s.st, simp);
    CHECK(err2.eta_total() == doctest::Approx(err.eta_total()).epsilon(1e-10));
}

TEST_CASE("estimator is independent of gamma0 in the inputs it reads") {
    // identical solutions evaluated under different gamma0 configs give
    // byte-identical breakdowns (the estimator never reads gamma)
    Solved s(2);
    ProblemSpec other = s.spec;
    other.gamma0 = 0.0; // estimator input only; no solve happens here
    EstimatorOptions eopt;
    const ErrorBreakdown a = estimate_error(s.sol, s.spec, s.mesh, s.spaces, s.st, eopt);
    const ErrorBreakdown b = estimate_error(s.sol, other, s.mesh, s.spaces, s.st, eopt);
    CHECK((a.element_eta2() - b.element_eta2()).norm() == 0.0);
}

TEST_CASE("surrogate half norms") {
    // constant c on one element: -1/2 surrogate = (h/p) c^2 h
    const double c = 3.0, h = 0.25;
    const double l2sq = c * c * h;
    CHECK(surrogate_half_norm({l2sq}, {h}, {2}, -1) ==
          doctest::Approx((h / 2.0) * c * c * h));
    CHECK(surrogate_half_norm({l2sq}, {h}, {2}, +1) ==
          doctest::Approx((2.0 / h) * c * c * h));
    // refinement halves the -1/2 surrogate of a fixed field: two half-elements
    // carry half the weighted mass of the single parent
    const double whole = surrogate_half_norm({c * c * h}, {h}, {1}, -1);
    const double halves = surrogate_half_norm({c * c * h / 2.0, c * c * h / 2.0},
                                              {h / 2.0, h / 2.0}, {1, 1}, -1);
    CHECK(halves == doctest::Approx(0.5 * whole));
}

TEST_CASE("dorfler marking") {
    auto bd = std::make_shared<PolygonalBoundary>(
        build_square_boundary(1.0, SquarePreset::CoulombNeumann));
    Mesh mesh = initial_mesh(bd, 2, 1); // 8 elements
    ErrorBreakdown err;
    for (Vec* v : {&err.neumann, &err.contact, &err.density, &err.compl_n,
                   &err.penetration, &err.sign_n, &err.friction, &err.stick})
        *v = Vec::Zero(8);

    SUBCASE("equal indicators: ceil(theta N) marked") {
        err.compl_n = Vec::Ones(8);
        const auto marked = dorfler_mark(mesh, err, 0.3);
        CHECK(marked.size() == 3); // 2.4 -> 3 elements to reach 30%
    }

    SUBCASE("single dominant element") {
        err.compl_n = Vec::Ones(8) * 0.07;
        err.compl_n[5] = 0.51;
        const auto marked = dorfler_mark(mesh, err, 0.3);
        REQUIRE(marked.size() == 1);
        CHECK(marked[0] == mesh.elements[5].id);
    }

    SUBCASE("theta near 1 marks every positive element") {
        err.compl_n = Vec::Ones(8);
        err.compl_n[3] = 0.0;
        const auto marked = dorfler_mark(mesh, err, 0.999);
        CHECK(marked.size() == 7);
    }

    SUBCASE("minimality: dropping the smallest marked element underflows theta") {
        err.compl_n << 0.4, 0.3, 0.1, 0.05, 0.05, 0.04, 0.03, 0.03;
        const auto marked = dorfler_mark(mesh, err, 0.5);
        double total = err.compl_n.sum();
        double acc = 0.0;
        for (long id : marked)
            for (std::size_t i = 0; i < mesh.size(); ++i)
                if (mesh.elements[i].id == id) acc += err.compl_n[(long)i];
        CHECK(acc >= 0.5 * total);
        // remove smallest marked
        double smallest = 1e30;
        for (long id : marked)
            for (std::size_t i = 0; i < mesh.size(); ++i)
                if (mesh.elements[i].id == id) smallest = std::min(smallest, err.compl_n[(long)i]);
        CHECK(acc - smallest < 0.5 * total);
    }
}

TEST_CASE("hp decision rule") {
    auto bd = std::make_shared<PolygonalBoundary>(
        build_square_boundary(1.0, SquarePreset::CoulombNeumann));
    Mesh mesh = initial_mesh(bd, 1, 1);
    ErrorBreakdown now;
    for (Vec* v : {&now.neumann, &now.contact, &now.density, &now.compl_n,
                   &now.penetration, &now.sign_n, &now.friction, &now.stick})
        *v = Vec::Zero(4);
    now.compl_n = Vec::Ones(4);
    std::vector<long> marked;
    for (const auto& e : mesh.elements) marked.push_back(e.id);

    AdaptiveState state;

    SUBCASE("no history: split everywhere") {
        const auto marks = hp_decide(mesh, marked, now, state);
        for (const auto& m : marks) CHECK(m.action == RefinementMark::Action::SplitH);
    }

    SUBCASE("collapsed indicator: raise p; stagnant indicator: split") {
        state.has_history = true;
        for (const auto& e : mesh.elements) state.prev_eta2[e.id] = 1.0;
        now.compl_n[0] = 1e-12; // collapsed
        now.compl_n[1] = 1.0;   // stagnant
        const auto marks = hp_decide(mesh, marked, now, state);
        CHECK(marks[0].action == RefinementMark::Action::RaiseP);
        CHECK(marks[1].action == RefinementMark::Action::SplitH);
    }

    SUBCASE("children compare against the parent record") {
        state.has_history = true;
        for (const auto& e : mesh.elements) state.prev_eta2[e.id] = 1.0;
        Mesh fine = apply_marks(mesh, {{mesh.elements[0].id, RefinementMark::Action::SplitH}});
        ErrorBreakdown fnow;
        for (Vec* v : {&fnow.neumann, &fnow.contact, &fnow.density, &fnow.compl_n,
                       &fnow.penetration, &fnow.sign_n, &fnow.friction, &fnow.stick})
            *v = Vec::Zero((long)fine.size());
        fnow.compl_n = Vec::Ones((long)fine.size()) * 1e-10;
        const auto marks = hp_decide(fine, {fine.elements[0].id}, fnow, state);
        CHECK(marks[0].action == RefinementMark::Action::RaiseP);
    }
}

TEST_CASE("adaptive loop: uniform strategy, records and monotone eta") {
    ProblemSpec spec = tresca_square_spec();
    const Mesh mesh0 = initial_mesh(spec.boundary, 2, 1);
    const auto recs = adaptive_loop(spec, mesh0, Strategy::UniformH, 3);
    REQUIRE(recs.size() == 3);
    CHECK(recs[1].mesh.size() == 2 * recs[0].mesh.size());
    CHECK(recs[2].mesh.size() == 4 * recs[0].mesh.size());
    CHECK(recs[0].n_dof > 0);
    // total indicator decreases under uniform refinement
    CHECK(recs[1].err.eta_total() < recs[0].err.eta_total());
    CHECK(recs[2].err.eta_total() < recs[1].err.eta_total());
}

TEST_CASE("loglog slope helper") {
    std::vector<double> x{10, 20, 40, 80}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
    CHECK(loglog_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK_THROWS(loglog_slope({1.0}, {1.0}));
}
