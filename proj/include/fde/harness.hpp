#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fde/evaluation.hpp"
#include "fde/fde.hpp"

namespace fde {

enum class ExperimentKind { lqr, tabular, properties };

struct TabularSettings {
    std::size_t n_states = 5;
    std::size_t n_actions = 2;
    std::size_t reward_support = 2;
    double gamma = 0.9;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::lqr;
    std::vector<std::string> methods{"pdf_l2", "rbf", "laplace", "kl", "energy", "fle"};
    std::vector<std::size_t> n_list{300, 1000};
    std::size_t reps = 50;
    std::uint64_t master_seed = 1;
    double sigma_rbf = 1.0;
    double sigma_lap = 1.0;
    double variance_floor = 0.0;
    std::size_t mc_samples = 1; ///< fle draws per transition
    TSelectionParams t_params{};
    OptimizerSettings optimizer{};
    std::size_t dpi_points = 1000;
    TabularSettings tabular{};
    std::string output_path = "results.csv";
    int workers = 0;     ///< 0 = OpenMP default
    bool timing = true;  ///< false writes runtime_ms = 0 so output is byte-stable

    /// Throws InvalidInput on unknown methods, empty n_list, reps = 0 and similar.
    void validate() const;
};

/// Parses an INI-style file (sections [experiment], [divergence], [t_selection],
/// [optimizer], [tabular]); keys absent from the file keep their defaults.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

/// Recognised method labels.
const std::vector<std::string>& known_methods();

/// Seeds for one replication; every method sees the same streams.
std::uint64_t rep_seed(std::uint64_t master, std::size_t rep);
std::uint64_t stream_seed(std::uint64_t rep_seed, Purpose purpose, std::uint64_t n = 0);

struct DatasetChecksum {
    std::string method;
    std::size_t n;
    std::size_t rep;
    std::uint64_t checksum;
};

struct ExperimentOutput {
    std::vector<InaccuracyReport> rows; ///< sorted by (method, n, rep)
    std::vector<DatasetChecksum> checksums;
};

/// LQR sweep over (method, n, rep). Failed fits become NaN rows with failed = true.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Tabular sweep on a random episodic MDP with exact ground truth.
ExperimentOutput run_tabular_experiment(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader = "method,n,rep,seed,T,inaccuracy,runtime_ms,failed";
inline constexpr const char* kToolVersion = "0.1.0";

void write_results_csv(std::ostream& os, const std::vector<InaccuracyReport>& rows);
/// Metadata sidecar: config echo, tool version, optimizer settings, d_pi scheme, dataset checksums.
void write_metadata_json(std::ostream& os, const ExperimentConfig& config, const ExperimentOutput& out);

struct SuiteReport {
    std::string suite;
    bool passed = true;
    std::size_t checks = 0;
    std::vector<std::string> counterexamples;
    std::vector<std::string> notes;
};

struct SuiteOptions {
    bool negative_control = false; ///< slc only: run the wrong-constant check instead
};

/// Runs one of: contraction, minimizer, slc, closed_forms, sandwich, telescoping.
/// Throws InvalidInput for any other name.
SuiteReport run_property_suite(const std::string& suite, std::uint64_t seed, const SuiteOptions& opts = {});

const std::vector<std::string>& suite_names();

}  // namespace fde
