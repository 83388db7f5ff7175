#include "hpbem/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

using namespace hpbem;

namespace {

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     const std::string& out_dir,
                                     const std::string& strategy,
                                     const std::string& basis, double gamma0) {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{}
                                             : load_config_file(config_path);
    if (!out_dir.empty()) c.out_dir = out_dir;
    if (!strategy.empty()) c.strategy = strategy;
    if (!basis.empty()) c.basis = basis;
    if (gamma0 > 0.0) c.gamma0 = gamma0;
    validate_config(c);
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hp-adaptive boundary element solver for frictional contact"};
    app.require_subcommand(1);

    std::string config_path, out_dir, strategy, basis, gamma_list;
    double gamma0 = -1.0;
    bool dump_matrices = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--strategy", strategy, "uniform_h | adaptive_h | adaptive_hp");
        sub->add_option("--basis", basis, "bernstein | gll");
        sub->add_option("--gamma0", gamma0, "stabilization constant");
    };

    CLI::App* run = app.add_subcommand("run", "run one experiment");
    add_common(run);
    run->add_flag("--dump-matrices", dump_matrices, "dump assembled operators");

    CLI::App* sweep = app.add_subcommand("sweep-gamma", "gamma0 sweep on a fixed mesh");
    add_common(sweep);
    sweep->add_option("--gamma0-list", gamma_list, "comma separated gamma0 values")
        ->required();

    CLI::App* cmp = app.add_subcommand("compare-stab",
                                       "full vs approximate stabilization");
    add_common(cmp);

    CLI::App* prof = app.add_subcommand("profile", "contact solution profile CSV");
    add_common(prof);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ExperimentConfig c =
                load_with_overrides(config_path, out_dir, strategy, basis, gamma0);
            RunRecord rec = run_experiment(c, true);
            if (dump_matrices) {
                const ProblemSpec spec = make_problem(c);
                const Mesh& mesh = rec.steps.back().mesh;
                DiscreteSpaces spaces = build_spaces(mesh, spec.basis);
                SteklovOperator st = build_steklov(mesh, spaces, spec.material, {});
                std::filesystem::create_directories(c.out_dir);
                dump_matrix(c.out_dir, "V", st.ops.V);
                dump_matrix(c.out_dir, "K", st.ops.K);
                dump_matrix(c.out_dir, "W", st.ops.W);
                dump_matrix(c.out_dir, "S", st.S);
            }
            std::cout << "steps=" << rec.steps.size()
                      << " final_eta=" << rec.steps.back().err.eta_total()
                      << " final_dof=" << rec.steps.back().n_dof << "\n";
        } else if (sweep->parsed()) {
            ExperimentConfig c =
                load_with_overrides(config_path, out_dir, strategy, basis, gamma0);
            auto rows = gamma0_sweep(c, parse_list(gamma_list), true);
            bool all_ok = true;
            for (const auto& r : rows) {
                std::cout << "gamma0=" << r.gamma0 << " eta=" << r.eta_total
                          << " min_eig=" << r.min_eig << " solved=" << r.solved << "\n";
                all_ok = all_ok && r.solved;
            }
            return all_ok ? 0 : 1;
        } else if (cmp->parsed()) {
            ExperimentConfig c =
                load_with_overrides(config_path, out_dir, strategy, basis, gamma0);
            auto rows = stabilization_comparison(c, true);
            for (const auto& r : rows)
                std::cout << "step=" << r.step << " rel_dev=" << r.rel_deviation << "\n";
        } else if (prof->parsed()) {
            ExperimentConfig c =
                load_with_overrides(config_path, out_dir, strategy, basis, gamma0);
            const std::string csv = profile_of_final_step(c);
            std::filesystem::create_directories(c.out_dir);
            write_text_file(c.out_dir + "/profile.csv", csv);
            std::cout << "profile written to " << c.out_dir << "/profile.csv\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
