#pragma once

#include "hpbem/contact.hpp"
#include "hpbem/estimator.hpp"

#include <string>

namespace hpbem {

/// Serializable experiment configuration (JSON).
struct ExperimentConfig {
    std::string preset = "tresca_square"; // tresca_square | coulomb_square
    std::string strategy = "uniform_h";   // uniform_h | adaptive_h | adaptive_hp
    int n_steps = 5;
    double gamma0 = 1e-3;
    std::string basis = "bernstein";      // bernstein | gll
    std::string stabilization = "full";   // full | approximate | off
    std::string out_dir = ".";
    bool residual_div10 = true;
    int n_initial_per_unit = 4;
    int p0 = 1;

    // optional inline problem overrides (NaN/empty = take preset values)
    double youngs_modulus = -1.0;
    double poisson_ratio = -1.0;
    double coulomb_coefficient = -1.0;

    bool operator==(const ExperimentConfig&) const = default;
};

std::string serialize_config(const ExperimentConfig& c);
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
void validate_config(const ExperimentConfig& c);

/// Materialize the ProblemSpec and loop parameters of a config.
ProblemSpec make_problem(const ExperimentConfig& c);
Strategy config_strategy(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);

} // namespace hpbem
