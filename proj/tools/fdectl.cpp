#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fde/error.hpp"
#include "fde/harness.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> reps;
    std::vector<std::size_t> n_list;
    std::vector<std::string> methods;
    std::optional<int> workers;
    bool no_timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "INI configuration file");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "CSV output path; metadata goes to <out>.json");
    cmd->add_option("--reps", o.reps, "replications per (method, n)");
    cmd->add_option("--n", o.n_list, "sample sizes")->delimiter(',');
    cmd->add_option("--methods", o.methods, "method labels")->delimiter(',');
    cmd->add_option("--workers", o.workers, "parallel cells (0 = all cores)");
    cmd->add_flag("--no-timing", o.no_timing, "write runtime_ms = 0 for byte-stable output");
}

fde::ExperimentConfig resolve(const Overrides& o, fde::ExperimentKind kind) {
    fde::ExperimentConfig c = o.config_path.empty() ? fde::ExperimentConfig{} : fde::load_config(o.config_path);
    c.experiment = kind;
    if (o.seed) c.master_seed = *o.seed;
    if (o.out) c.output_path = *o.out;
    if (o.reps) c.reps = *o.reps;
    if (!o.n_list.empty()) c.n_list = o.n_list;
    if (!o.methods.empty()) c.methods = o.methods;
    if (o.workers) c.workers = *o.workers;
    if (o.no_timing) c.timing = false;
    c.validate();
    return c;
}

int write_outputs(const fde::ExperimentConfig& c, const fde::ExperimentOutput& out) {
    std::ofstream csv(c.output_path);
    if (!csv) {
        std::cerr << "cannot write " << c.output_path << "\n";
        return 1;
    }
    fde::write_results_csv(csv, out.rows);
    std::ofstream meta(c.output_path + ".json");
    fde::write_metadata_json(meta, c, out);
    std::size_t failed = 0;
    for (const auto& r : out.rows) failed += r.failed ? 1 : 0;
    std::cerr << out.rows.size() << " rows (" << failed << " failed) written to " << c.output_path << "\n";
    return 0;
}

nlohmann::json matrix_json(const fde::Mat2& m) {
    return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributional off-policy evaluation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fde::kToolVersion);

    Overrides lqr_opts, tab_opts;
    auto* lqr = app.add_subcommand("run-lqr", "LQR sweep over methods, sample sizes and replications");
    add_common(lqr, lqr_opts);
    auto* tab = app.add_subcommand("run-tabular", "tabular sweep on a random episodic MDP");
    add_common(tab, tab_opts);

    std::string suite;
    std::uint64_t suite_seed = 1;
    bool negative_control = false;
    auto* check = app.add_subcommand("check", "run a property suite");
    check->add_option("--suite", suite, "suite name or 'all'")->required();
    check->add_option("--seed", suite_seed, "suite seed");
    check->add_flag("--negative-control", negative_control, "slc only: use a wrong contraction constant");

    auto* truth = app.add_subcommand("truth-lqr", "print the ground-truth mean parameters as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*lqr || *tab) {
            const bool is_lqr = static_cast<bool>(*lqr);
            const auto c = resolve(is_lqr ? lqr_opts : tab_opts,
                                   is_lqr ? fde::ExperimentKind::lqr : fde::ExperimentKind::tabular);
            const auto out = is_lqr ? fde::run_experiment(c) : fde::run_tabular_experiment(c);
            return write_outputs(c, out);
        }
        if (*check) {
            std::vector<std::string> names;
            if (suite == "all")
                names = fde::suite_names();
            else
                names.push_back(suite);
            bool all_passed = true;
            for (const auto& name : names) {
                const auto r = fde::run_property_suite(name, suite_seed, {negative_control});
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << " (" << r.checks << " checks)\n";
                for (const auto& n : r.notes) std::cout << "  " << n << "\n";
                for (const auto& c : r.counterexamples) std::cout << "  counterexample: " << c << "\n";
                all_passed = all_passed && r.passed;
            }
            return all_passed ? 0 : 2;
        }
        if (*truth) {
            const fde::LQREnv env = fde::LQREnv::standard();
            const fde::LQRTheta t = fde::lqr_true_params(env);
            nlohmann::json j{{"gamma", env.gamma},
                             {"sigma0", env.sigma0},
                             {"return_variance", env.return_variance()},
                             {"M1", matrix_json(t.M1)},
                             {"M2", matrix_json(t.M2)},
                             {"M3", matrix_json(t.M3)}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    } catch (const fde::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
