#include "fde/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <omp.h>

#include "fde/error.hpp"

namespace fde {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty()) out.push_back(t);
    return out;
}

template <class T>
T get_or(const boost::property_tree::ptree& pt, const std::string& key, T fallback) {
    try {
        return pt.get<T>(key, fallback);
    } catch (const boost::property_tree::ptree_bad_data&) {
        throw InvalidInput("config key '" + key + "' has an invalid value");
    }
}

bool is_bregman(const std::string& m) {
    return m == "cramer" || m == "energy" || m == "rbf" || m == "laplace" || m == "pdf_l2" || m == "kl";
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int worker_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

struct Cell {
    std::size_t method;
    std::size_t n;
    std::size_t rep;
};

std::vector<Cell> make_cells(const ExperimentConfig& c) {
    std::vector<Cell> cells;
    for (std::size_t m = 0; m < c.methods.size(); ++m)
        for (std::size_t n : c.n_list)
            for (std::size_t r = 0; r < c.reps; ++r) cells.push_back({m, n, r});
    return cells;
}

void sort_output(ExperimentOutput& out) {
    auto key = [](const InaccuracyReport& r) { return std::tie(r.method, r.n, r.rep); };
    std::vector<std::size_t> idx(out.rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return key(out.rows[a]) < key(out.rows[b]); });
    ExperimentOutput sorted;
    for (auto i : idx) {
        sorted.rows.push_back(out.rows[i]);
        sorted.checksums.push_back(out.checksums[i]);
    }
    out = std::move(sorted);
}

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::lqr: return "lqr";
        case ExperimentKind::tabular: return "tabular";
        case ExperimentKind::properties: return "properties";
    }
    return "?";
}

}  // namespace

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m{"cramer", "energy", "rbf", "laplace", "pdf_l2", "kl", "fle", "tvd_mc"};
    return m;
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw InvalidInput("no methods given");
    for (const auto& m : methods)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            throw InvalidInput("unknown method '" + m + "'");
    if (n_list.empty()) throw InvalidInput("n list is empty");
    for (std::size_t n : n_list)
        if (n == 0) throw InvalidInput("sample sizes must be >= 1");
    if (reps == 0) throw InvalidInput("reps must be >= 1");
    if (!(sigma_rbf > 0.0) || !(sigma_lap > 0.0)) throw InvalidInput("kernel bandwidths must be > 0");
    if (!(variance_floor >= 0.0)) throw InvalidInput("variance floor must be >= 0");
    if (mc_samples == 0) throw InvalidInput("mc_samples must be >= 1");
    if (dpi_points == 0) throw InvalidInput("dpi_points must be >= 1");
    if (!(optimizer.tolerance > 0.0) || !(optimizer.f_rel_tol >= 0.0) || optimizer.max_evals == 0) throw InvalidInput("optimizer settings out of range");
    if (optimizer.gradient == GradientMode::finite_difference && !(optimizer.fd_step > 0.0))
        throw InvalidInput("finite-difference step must be > 0");
    if (t_params.c - 1.0 / (2.0 * t_params.q) <= 0.0) throw InvalidInput("t_selection needs c - 1/(2q) > 0");
    if (workers < 0) throw InvalidInput("workers must be >= 0");
    if (tabular.n_states < 2 || tabular.n_actions == 0 || tabular.reward_support == 0 ||
        !(tabular.gamma > 0.0 && tabular.gamma < 1.0))
        throw InvalidInput("tabular settings out of range");
}

ExperimentConfig parse_config(std::istream& in) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InvalidInput(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    const auto kind = get_or<std::string>(pt, "experiment.kind", "lqr");
    if (kind == "lqr")
        c.experiment = ExperimentKind::lqr;
    else if (kind == "tabular")
        c.experiment = ExperimentKind::tabular;
    else if (kind == "properties")
        c.experiment = ExperimentKind::properties;
    else
        throw InvalidInput("unknown experiment kind '" + kind + "'");
    if (auto m = pt.get_optional<std::string>("experiment.methods")) c.methods = split_list(*m);
    if (auto n = pt.get_optional<std::string>("experiment.n")) {
        c.n_list.clear();
        for (const auto& v : split_list(*n)) {
            try {
                c.n_list.push_back(std::stoul(v));
            } catch (const std::exception&) {
                throw InvalidInput("bad sample size '" + v + "'");
            }
        }
    }
    c.reps = get_or<std::size_t>(pt, "experiment.reps", c.reps);
    c.master_seed = get_or<std::uint64_t>(pt, "experiment.seed", c.master_seed);
    c.output_path = get_or<std::string>(pt, "experiment.output", c.output_path);
    c.workers = get_or<int>(pt, "experiment.workers", c.workers);
    c.dpi_points = get_or<std::size_t>(pt, "experiment.dpi_points", c.dpi_points);
    c.timing = get_or<bool>(pt, "experiment.timing", c.timing);

    c.sigma_rbf = get_or<double>(pt, "divergence.sigma_rbf", c.sigma_rbf);
    c.sigma_lap = get_or<double>(pt, "divergence.sigma_lap", c.sigma_lap);
    c.variance_floor = get_or<double>(pt, "divergence.variance_floor", c.variance_floor);
    c.mc_samples = get_or<std::size_t>(pt, "divergence.mc_samples", c.mc_samples);

    auto& t = c.t_params;
    t.l = get_or<double>(pt, "t_selection.l", t.l);
    t.delta = get_or<double>(pt, "t_selection.delta", t.delta);
    t.c = get_or<double>(pt, "t_selection.c", t.c);
    t.q = get_or<double>(pt, "t_selection.q", t.q);
    t.alpha = get_or<double>(pt, "t_selection.alpha", t.alpha);
    t.c_divide = get_or<double>(pt, "t_selection.c_divide", t.c_divide);

    auto& o = c.optimizer;
    o.max_evals = get_or<std::size_t>(pt, "optimizer.max_evals", o.max_evals);
    o.tolerance = get_or<double>(pt, "optimizer.tolerance", o.tolerance);
    o.fd_step = get_or<double>(pt, "optimizer.fd_step", o.fd_step);
    o.f_rel_tol = get_or<double>(pt, "optimizer.f_rel_tol", o.f_rel_tol);
    const auto grad = get_or<std::string>(pt, "optimizer.gradient", "finite_difference");
    if (grad == "finite_difference")
        o.gradient = GradientMode::finite_difference;
    else if (grad == "analytic")
        o.gradient = GradientMode::analytic;
    else
        throw InvalidInput("unknown gradient mode '" + grad + "'");

    auto& tb = c.tabular;
    tb.n_states = get_or<std::size_t>(pt, "tabular.states", tb.n_states);
    tb.n_actions = get_or<std::size_t>(pt, "tabular.actions", tb.n_actions);
    tb.reward_support = get_or<std::size_t>(pt, "tabular.reward_support", tb.reward_support);
    tb.gamma = get_or<double>(pt, "tabular.gamma", tb.gamma);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config '" + path + "'");
    return parse_config(in);
}

std::uint64_t rep_seed(std::uint64_t master, std::size_t rep) { return derive_seed(master, {rep}); }

std::uint64_t stream_seed(std::uint64_t rs, Purpose purpose, std::uint64_t n) {
    return derive_seed(rs, {static_cast<std::uint64_t>(purpose), n});
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    config.validate();
    for (const auto& m : config.methods)
        if (m == "tvd_mc") throw InvalidInput("tvd_mc has no Gaussian closed form and cannot drive the LQR fit");
    const LQREnv env = LQREnv::standard();
    const LQRTheta theta_star = lqr_true_params(env);
    const auto cells = make_cells(config);

    ExperimentOutput out;
    out.rows.resize(cells.size());
    out.checksums.resize(cells.size());
    std::exception_ptr error;
    const auto n_cells = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count(config.workers))
    for (std::ptrdiff_t k = 0; k < n_cells; ++k) {
        const Cell& cell = cells[static_cast<std::size_t>(k)];
        const std::string& method = config.methods[cell.method];
        const std::uint64_t rs = rep_seed(config.master_seed, cell.rep);
        InaccuracyReport row;
        row.method = method;
        row.n = cell.n;
        row.rep = cell.rep;
        row.seed = rs;
        try {
            Rng data_rng(stream_seed(rs, Purpose::data, cell.n));
            const LQRDataset d = lqr_collect(env, cell.n, data_rng);
            Rng dpi_rng(stream_seed(rs, Purpose::dpi));
            const auto dpi = estimate_dpi(env, config.dpi_points, dpi_rng);
            out.checksums[static_cast<std::size_t>(k)] = {method, cell.n, cell.rep, checksum(d)};

            FDEConfig fc;
            fc.t_params = config.t_params;
            fc.optimizer = config.optimizer;
            fc.mc_samples = config.mc_samples;
            fc.seed = stream_seed(rs, Purpose::fle, cell.n);
            const auto t0 = std::chrono::steady_clock::now();
            try {
                FitResult fit;
                if (method == "fle") {
                    fit = fle_run(d, env, fc);
                } else {
                    fc.divergence = divergence_from_label(method, config.sigma_rbf, config.sigma_lap);
                    fc.divergence.variance_floor = config.variance_floor;
                    fit = fde_run(d, env, fc);
                }
                row.T_used = fit.T;
                row.inaccuracy = lqr_inaccuracy(fit.theta, theta_star, dpi, 1.0);
            } catch (const OptimizationFailure&) {
                row.inaccuracy = std::numeric_limits<double>::quiet_NaN();
                row.failed = true;
                row.T_used = choose_T(cell.n, env.gamma, config.t_params);
            }
            row.runtime_ms = config.timing ? elapsed_ms(t0) : 0.0;
        } catch (...) {
#pragma omp critical(fde_harness_error)
            if (!error) error = std::current_exception();
        }
        out.rows[static_cast<std::size_t>(k)] = row;
    }
    if (error) std::rethrow_exception(error);
    sort_output(out);
    return out;
}

ExperimentOutput run_tabular_experiment(const ExperimentConfig& config) {
    config.validate();
    for (const auto& m : config.methods)
        if (!is_bregman(m) && m != "fle")
            throw InvalidInput("method '" + m + "' is not available for the tabular experiment");
    const auto& ts = config.tabular;
    Rng mdp_rng(derive_seed(config.master_seed, {static_cast<std::uint64_t>(Purpose::mdp)}));
    const TabularMDP mdp = tabular_make_episodic(ts.n_states, ts.n_actions, ts.reward_support, mdp_rng, ts.gamma);
    // Target policy: one Dirichlet(1) row per state, last entry absorbing the rounding.
    std::vector<double> pi_probs;
    for (std::size_t s = 0; s < mdp.n_states; ++s) {
        std::vector<double> row(mdp.n_actions);
        double total = 0.0;
        for (auto& p : row) total += (p = -std::log1p(-mdp_rng.uniform()));
        double head = 0.0;
        for (std::size_t a = 0; a + 1 < row.size(); ++a) head += (row[a] /= total);
        row.back() = 1.0 - head;
        pi_probs.insert(pi_probs.end(), row.begin(), row.end());
    }
    const Policy pi = Policy::make(mdp.n_states, mdp.n_actions, pi_probs);
    const Policy behavior = Policy::uniform(mdp.n_states, mdp.n_actions);
    const ReturnTable truth = solve_return_fixed_point(mdp, pi, 1e-12, 10 * mdp.n_states + 10).table;
    const auto weights = exact_dpi(mdp, tabular_rho(mdp, behavior), pi);
    const auto cells = make_cells(config);

    ExperimentOutput out;
    out.rows.resize(cells.size());
    out.checksums.resize(cells.size());
    std::exception_ptr error;
    const auto n_cells = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count(config.workers))
    for (std::ptrdiff_t k = 0; k < n_cells; ++k) {
        const Cell& cell = cells[static_cast<std::size_t>(k)];
        const std::string& method = config.methods[cell.method];
        const std::uint64_t rs = rep_seed(config.master_seed, cell.rep);
        InaccuracyReport row;
        row.method = method;
        row.n = cell.n;
        row.rep = cell.rep;
        row.seed = rs;
        try {
            Rng data_rng(stream_seed(rs, Purpose::data, cell.n));
            const TabularDataset d = tabular_collect(mdp, behavior, cell.n, data_rng);
            out.checksums[static_cast<std::size_t>(k)] = {method, cell.n, cell.rep, checksum(d)};
            const std::size_t T = std::min(choose_T(cell.n, mdp.gamma, config.t_params), cell.n);
            const auto t0 = std::chrono::steady_clock::now();
            const std::size_t B = method == "fle" ? config.mc_samples : 0;
            const auto fit = tabular_fde_run(d, mdp.n_states, mdp.n_actions, pi, mdp.gamma, T, B,
                                             stream_seed(rs, Purpose::fle, cell.n));
            row.T_used = T;
            row.inaccuracy = tabular_inaccuracy(fit.iterates.back(), truth, weights, 1.0, 1.0);
            row.runtime_ms = config.timing ? elapsed_ms(t0) : 0.0;
        } catch (...) {
#pragma omp critical(fde_harness_error)
            if (!error) error = std::current_exception();
        }
        out.rows[static_cast<std::size_t>(k)] = row;
    }
    if (error) std::rethrow_exception(error);
    sort_output(out);
    return out;
}

void write_results_csv(std::ostream& os, const std::vector<InaccuracyReport>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.method << ',' << r.n << ',' << r.rep << ',' << r.seed << ',' << r.T_used << ',';
        if (std::isnan(r.inaccuracy))
            os << "nan";
        else
            os << std::setprecision(12) << r.inaccuracy;
        os << ',' << std::fixed << std::setprecision(3) << r.runtime_ms << std::defaultfloat << ','
           << (r.failed ? 1 : 0) << '\n';
    }
}

void write_metadata_json(std::ostream& os, const ExperimentConfig& c, const ExperimentOutput& out) {
    using nlohmann::json;
    json j;
    j["tool"] = "fdectl";
    j["version"] = kToolVersion;
    j["config"] = {{"experiment", kind_name(c.experiment)},
                   {"methods", c.methods},
                   {"n", c.n_list},
                   {"reps", c.reps},
                   {"master_seed", c.master_seed},
                   {"sigma_rbf", c.sigma_rbf},
                   {"sigma_lap", c.sigma_lap},
                   {"variance_floor", c.variance_floor},
                   {"mc_samples", c.mc_samples},
                   {"dpi_points", c.dpi_points},
                   {"workers", c.workers},
                   {"timing", c.timing},
                   {"t_selection",
                    {{"l", c.t_params.l},
                     {"delta", c.t_params.delta},
                     {"c", c.t_params.c},
                     {"q", c.t_params.q},
                     {"alpha", c.t_params.alpha},
                     {"c_divide", c.t_params.c_divide}}}};
    if (c.experiment == ExperimentKind::tabular)
        j["config"]["tabular"] = {{"states", c.tabular.n_states},
                                  {"actions", c.tabular.n_actions},
                                  {"reward_support", c.tabular.reward_support},
                                  {"gamma", c.tabular.gamma}};
    j["optimizer"] = {{"method", "lbfgs"},
                      {"line_search", "strong_wolfe"},
                      {"max_evals", c.optimizer.max_evals},
                      {"max_evals_counts", "value+gradient evaluations"},
                      {"tolerance", c.optimizer.tolerance},
                      {"f_rel_tol", c.optimizer.f_rel_tol},
                      {"gradient", c.optimizer.gradient == GradientMode::analytic ? "analytic" : "finite_difference"},
                      {"fd_step", c.optimizer.fd_step}};
    if (c.experiment == ExperimentKind::tabular)
        j["dpi"] = {{"scheme", "exact: (1-gamma) rho (I - gamma P_pi)^-1, rho uniform state x behaviour action"}};
    else
        j["dpi"] = {{"scheme", "geometric horizon H with P(H=h)=(1-gamma)gamma^(h-1); start from behaviour law; "
                               "follow the target for H-1 steps"},
                    {"points", c.dpi_points},
                    {"seed_stream", "per replication, shared across methods and n"}};
    json sums = json::array();
    for (const auto& s : out.checksums)
        sums.push_back({{"method", s.method}, {"n", s.n}, {"rep", s.rep}, {"checksum", s.checksum}});
    j["dataset_checksums"] = sums;
    os << j.dump(2) << '\n';
}

}  // namespace fde
