#pragma once

#include "hpbem/config.hpp"
#include "hpbem/io.hpp"

namespace hpbem {

struct RunRecord {
    std::string config_hash;
    std::vector<StepRecord> steps;
    std::string csv;
    double wall_time_s = 0.0;
};

Mesh make_initial_mesh(const ExperimentConfig& c);

/// Execute the adaptive loop of a config; optionally write CSV/JSON artifacts
/// into config.out_dir.
RunRecord run_experiment(const ExperimentConfig& c, bool write_files = true);

struct GammaSweepRow {
    double gamma0 = 0.0;
    double eta_total = 0.0;
    double min_eig = 0.0; // of S - gamma0 Shat on the admissible subspace
    bool solved = false;
};

/// One solve per gamma0 on the fixed initial mesh of the config.
std::vector<GammaSweepRow> gamma0_sweep(const ExperimentConfig& base,
                                        const std::vector<double>& gammas,
                                        bool write_files = true);

/// gamma0 at which S - gamma0 Shat loses positivity (from one generalized
/// eigenvalue problem; the stabilization blocks are linear in gamma0).
double coercivity_threshold(const ExperimentConfig& base);

struct StabCompareRow {
    int step = 0;
    long n_dof = 0;
    double eta_full = 0.0;
    double eta_approx = 0.0;
    double rel_deviation = 0.0;
};

/// Full vs approximate stabilization on the identical mesh sequence generated
/// by the full-mode run.
std::vector<StabCompareRow> stabilization_comparison(const ExperimentConfig& base,
                                                     bool write_files = true);

/// Profile CSV of the final solution of a run (200 contact samples).
std::string profile_of_final_step(const ExperimentConfig& c);

} // namespace hpbem
