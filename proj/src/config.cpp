#include "hpbem/config.hpp"

#include "hpbem/presets.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace hpbem {

using nlohmann::json;

std::string serialize_config(const ExperimentConfig& c) {
    json j;
    j["preset"] = c.preset;
    j["strategy"] = c.strategy;
    j["n_steps"] = c.n_steps;
    j["gamma0"] = c.gamma0;
    j["basis"] = c.basis;
    j["stabilization"] = c.stabilization;
    j["out_dir"] = c.out_dir;
    j["residual_div10"] = c.residual_div10;
    j["n_initial_per_unit"] = c.n_initial_per_unit;
    j["p0"] = c.p0;
    if (c.youngs_modulus > 0.0) j["youngs_modulus"] = c.youngs_modulus;
    if (c.poisson_ratio > 0.0) j["poisson_ratio"] = c.poisson_ratio;
    if (c.coulomb_coefficient >= 0.0) j["coulomb_coefficient"] = c.coulomb_coefficient;
    return j.dump(2);
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) {
            try {
                field = j.at(key).get<std::decay_t<decltype(field)>>();
            } catch (const json::type_error& e) {
                throw std::invalid_argument(std::string("config field '") + key +
                                            "': " + e.what());
            }
        }
    };
    get("preset", c.preset);
    get("strategy", c.strategy);
    get("n_steps", c.n_steps);
    get("gamma0", c.gamma0);
    get("basis", c.basis);
    get("stabilization", c.stabilization);
    get("out_dir", c.out_dir);
    get("residual_div10", c.residual_div10);
    get("n_initial_per_unit", c.n_initial_per_unit);
    get("p0", c.p0);
    get("youngs_modulus", c.youngs_modulus);
    get("poisson_ratio", c.poisson_ratio);
    get("coulomb_coefficient", c.coulomb_coefficient);
    validate_config(c);
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
    if (c.preset != "tresca_square" && c.preset != "coulomb_square")
        throw std::invalid_argument("config: unknown preset '" + c.preset + "'");
    parse_strategy(c.strategy);
    if (c.basis != "bernstein" && c.basis != "gll")
        throw std::invalid_argument("config: unknown basis '" + c.basis + "'");
    if (c.stabilization != "full" && c.stabilization != "approximate" &&
        c.stabilization != "off")
        throw std::invalid_argument("config: unknown stabilization '" + c.stabilization + "'");
    if (c.stabilization == "off" && c.gamma0 > 0.0)
        throw std::invalid_argument("config: stabilization 'off' contradicts gamma0 > 0");
    if (c.stabilization != "off" && !(c.gamma0 > 0.0))
        throw std::invalid_argument("config: gamma0 must be positive");
    if (c.n_steps < 1) throw std::invalid_argument("config: n_steps >= 1");
    if (c.n_initial_per_unit < 1) throw std::invalid_argument("config: n_initial_per_unit >= 1");
    if (c.p0 < 1) throw std::invalid_argument("config: p0 >= 1");
}

ProblemSpec make_problem(const ExperimentConfig& c) {
    ProblemSpec spec =
        (c.preset == "tresca_square") ? tresca_square_spec() : coulomb_square_spec();
    spec.gamma0 = c.gamma0;
    spec.basis = (c.basis == "gll") ? BasisKind::GLL : BasisKind::Bernstein;
    if (c.stabilization == "approximate")
        spec.stab_mode = StabilizationMode::Approximate;
    else if (c.stabilization == "off")
        spec.stab_mode = StabilizationMode::Off;
    else
        spec.stab_mode = StabilizationMode::Full;
    if (c.youngs_modulus > 0.0 || c.poisson_ratio > 0.0) {
        const double E = c.youngs_modulus > 0.0 ? c.youngs_modulus
                                                : spec.material.youngs_modulus;
        const double nu = c.poisson_ratio > 0.0 ? c.poisson_ratio
                                                : spec.material.poisson_ratio;
        spec.material = Material(E, nu);
    }
    if (c.coulomb_coefficient >= 0.0 && !spec.is_tresca())
        spec.friction = CoulombFriction{c.coulomb_coefficient};
    return spec;
}

Strategy config_strategy(const ExperimentConfig& c) { return parse_strategy(c.strategy); }

std::string config_hash(const ExperimentConfig& c) {
    const std::size_t h = std::hash<std::string>{}(serialize_config(c));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016zx", h);
    return buf;
}

} // namespace hpbem
