#include "hpbem/experiments.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

namespace hpbem {

Mesh make_initial_mesh(const ExperimentConfig& c) {
    const ProblemSpec spec = make_problem(c);
    return initial_mesh(spec.boundary, c.n_initial_per_unit, c.p0);
}

RunRecord run_experiment(const ExperimentConfig& c, bool write_files) {
    validate_config(c);
    const auto t0 = std::chrono::steady_clock::now();
    const ProblemSpec spec = make_problem(c);
    const Mesh mesh0 = initial_mesh(spec.boundary, c.n_initial_per_unit, c.p0);

    RunRecord rec;
    rec.config_hash = config_hash(c);

    std::ofstream diag;
    if (write_files) {
        std::filesystem::create_directories(c.out_dir);
        diag.open(c.out_dir + "/solver_log.jsonl");
    }
    EstimatorOptions eopt;
    eopt.residual_div10 = c.residual_div10;
    LoopCallbacks cb;
    cb.diag_stream = write_files ? &diag : nullptr;

    rec.steps = adaptive_loop(spec, mesh0, config_strategy(c), c.n_steps, eopt, {}, cb);

    rec.csv = run_csv_header();
    for (std::size_t k = 0; k < rec.steps.size(); ++k)
        rec.csv += run_csv_row(static_cast<int>(k), rec.steps[k]);
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (write_files) {
        write_text_file(c.out_dir + "/run.csv", rec.csv);
        write_text_file(c.out_dir + "/config.json", serialize_config(c));
        for (std::size_t k = 0; k < rec.steps.size(); ++k)
            write_text_file(c.out_dir + "/mesh_step_" + std::to_string(k) + ".json",
                            mesh_to_json(rec.steps[k].mesh));
        nlohmann::json j;
        j["config_hash"] = rec.config_hash;
        j["n_steps"] = rec.steps.size();
        j["wall_time_s"] = rec.wall_time_s;
        j["final_eta"] = rec.steps.back().err.eta_total();
        j["final_n_dof"] = rec.steps.back().n_dof;
        write_text_file(c.out_dir + "/run_record.json", j.dump(2));
    }
    return rec;
}

namespace {

struct FixedMeshSetup {
    ProblemSpec spec;
    Mesh mesh;
    DiscreteSpaces spaces;
    SteklovOperator st;
    Mat C; // rigid rows or empty
};

FixedMeshSetup setup_fixed(const ExperimentConfig& c) {
    FixedMeshSetup s{make_problem(c), Mesh{}, DiscreteSpaces{}, SteklovOperator{}, Mat()};
    s.mesh = initial_mesh(s.spec.boundary, c.n_initial_per_unit, c.p0);
    s.spaces = build_spaces(s.mesh, s.spec.basis);
    s.st = build_steklov(s.mesh, s.spaces, s.spec.material, {});
    if (s.mesh.closed_curve()) s.C = rigid_body_functionals(s.mesh, s.spaces);
    return s;
}

} // namespace

std::vector<GammaSweepRow> gamma0_sweep(const ExperimentConfig& base,
                                        const std::vector<double>& gammas,
                                        bool write_files) {
    if (gammas.empty()) throw std::invalid_argument("gamma0_sweep: empty gamma list");
    ExperimentConfig c = base;
    c.n_steps = 1;
    validate_config(c);
    FixedMeshSetup s = setup_fixed(c);
    const StabilizationMatrices stab = build_stabilization(
        s.mesh, s.spaces, s.spec.material,
        s.st, c.stabilization == "approximate" ? StabilizationMode::Approximate
                                               : StabilizationMode::Full, {});
    EstimatorOptions eopt;
    eopt.residual_div10 = c.residual_div10;

    std::vector<GammaSweepRow> rows;
    for (double g0 : gammas) {
        GammaSweepRow row;
        row.gamma0 = g0;
        const Mat A = s.st.S - g0 * stab.Shat;
        row.min_eig = s.C.rows() > 0 ? min_eig_sym_constrained(A, s.C) : min_eig_sym(A);
        try {
            ProblemSpec spec_g = s.spec;
            spec_g.gamma0 = g0;
            DiscreteSolution sol =
                solve_problem(spec_g, s.mesh, s.spaces, s.st, stab, {});
            const ErrorBreakdown err =
                estimate_error(sol, spec_g, s.mesh, s.spaces, s.st, eopt, {});
            row.eta_total = err.eta_total();
            row.solved = true;
        } catch (const std::exception&) {
            row.solved = false;
        }
        rows.push_back(row);
    }
    if (write_files) {
        std::filesystem::create_directories(base.out_dir);
        std::string csv = "gamma0,eta_total,min_eig,solved\n";
        char buf[160];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e,%d\n", r.gamma0,
                          r.eta_total, r.min_eig, r.solved ? 1 : 0);
            csv += buf;
        }
        write_text_file(base.out_dir + "/sweep_gamma.csv", csv);
    }
    return rows;
}

double coercivity_threshold(const ExperimentConfig& base) {
    ExperimentConfig c = base;
    c.n_steps = 1;
    validate_config(c);
    FixedMeshSetup s = setup_fixed(c);
    const StabilizationMatrices stab = build_stabilization(
        s.mesh, s.spaces, s.spec.material, s.st, StabilizationMode::Full, {});
    // S - g0 Shat loses positivity at g0 = 1 / max eig of (Shat, S) on the
    // admissible subspace
    Mat S = s.st.S, Sh = stab.Shat;
    if (s.C.rows() > 0) {
        Eigen::JacobiSVD<Mat> svd(s.C, Eigen::ComputeFullV);
        const Mat Z = svd.matrixV().rightCols(S.rows() - s.C.rows());
        S = Z.transpose() * S * Z;
        Sh = Z.transpose() * Sh * Z;
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(0.5 * (Sh + Sh.transpose()),
                                                      0.5 * (S + S.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double theta_max = ges.eigenvalues().maxCoeff();
    if (!(theta_max > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / theta_max;
}

std::vector<StabCompareRow> stabilization_comparison(const ExperimentConfig& base,
                                                     bool write_files) {
    ExperimentConfig cfull = base;
    cfull.stabilization = "full";
    validate_config(cfull);
    const RunRecord full = run_experiment(cfull, false);

    const ProblemSpec spec_full = make_problem(cfull);
    ProblemSpec spec_approx = spec_full;
    spec_approx.stab_mode = StabilizationMode::Approximate;
    EstimatorOptions eopt;
    eopt.residual_div10 = base.residual_div10;

    std::vector<StabCompareRow> rows;
    for (std::size_t k = 0; k < full.steps.size(); ++k) {
        const Mesh& mesh = full.steps[k].mesh;
        DiscreteSpaces spaces = build_spaces(mesh, spec_approx.basis);
        SteklovOperator st = build_steklov(mesh, spaces, spec_approx.material, {});
        StabilizationMatrices stab = build_stabilization(
            mesh, spaces, spec_approx.material, st, StabilizationMode::Approximate, {});
        DiscreteSolution sol = solve_problem(spec_approx, mesh, spaces, st, stab, {});
        const ErrorBreakdown err = estimate_error(sol, spec_approx, mesh, spaces, st,
                                                  eopt, {});
        StabCompareRow row;
        row.step = static_cast<int>(k);
        row.n_dof = full.steps[k].n_dof;
        row.eta_full = full.steps[k].err.eta_total();
        row.eta_approx = err.eta_total();
        row.rel_deviation = (row.eta_approx - row.eta_full) / row.eta_full;
        rows.push_back(row);
    }
    if (write_files) {
        std::filesystem::create_directories(base.out_dir);
        std::string csv = "step,n_dof,eta_full,eta_approx,rel_deviation\n";
        char buf[200];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%d,%ld,%.12e,%.12e,%.12e\n", r.step, r.n_dof,
                          r.eta_full, r.eta_approx, r.rel_deviation);
            csv += buf;
        }
        write_text_file(base.out_dir + "/compare_stab.csv", csv);
    }
    return rows;
}

std::string profile_of_final_step(const ExperimentConfig& c) {
    RunRecord rec = run_experiment(c, false);
    const Mesh& mesh = rec.steps.back().mesh;
    DiscreteSpaces spaces = build_spaces(mesh, make_problem(c).basis);
    return solution_profile_csv(rec.steps.back().sol, mesh, spaces);
}

} // namespace hpbem
