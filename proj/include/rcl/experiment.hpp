// Config-driven experiment runner: parse and validate a JSON experiment
// config, execute single runs into self-contained run directories, and drive
// seed/K/rate/beta/method sweeps with aggregate and significance reports.
//
// Unknown config keys are errors (they are almost always typos of
// hyperparameter names) and every validation message carries the offending
// key path. Schema reference lives in the README.
#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcl/dataset.hpp"
#include "rcl/run_io.hpp"
#include "rcl/stats.hpp"
#include "rcl/trainers.hpp"

namespace rcl {

// Configuration problems (parse errors, schema violations, bad values) are
// reported as ConfigError so the CLI can exit with a distinct code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetConfig {
    std::string kind = "blobs";  // "blobs" or "csv"
    // blobs
    int classes = 4;
    int per_class = 500;
    int dim = 2;
    double separation = 6.0;
    std::uint64_t seed = 1;
    // csv
    std::string path;
    std::string label_column;
    // shared
    double test_fraction = 0.25;
    std::uint64_t split_seed = 1;
};

struct NoiseConfig {
    std::string kind = "none";  // "sym", "pf", "none"
    double rate = 0.0;
    std::uint64_t seed = 1;
};

struct SweepConfig {
    std::vector<std::string> methods;
    std::vector<int> networks;
    std::vector<double> rates;
    std::vector<double> betas;
    std::vector<std::uint64_t> seeds;

    bool empty() const {
        return methods.empty() && networks.empty() && rates.empty() && betas.empty() &&
               seeds.empty();
    }
};

struct ExperimentConfig {
    std::string output_dir = "runs";
    DatasetConfig dataset;
    NoiseConfig noise;
    TrainerConfig trainer;
    std::optional<double> trainer_epsilon;  // remember-rate epsilon; defaults to noise.rate
    std::optional<SweepConfig> sweep;
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& prefix) {
    if (!j.is_object()) throw ConfigError("config: " + prefix + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key " +
                              (prefix.empty() ? key : prefix + "." + key));
        }
    }
}

template <class T>
T get_or(const nlohmann::json& j, const std::string& key, const std::string& prefix, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: bad value for " + (prefix.empty() ? key : prefix + "." + key));
    }
}

inline std::string format_rate_token(double rate) {
    std::string s = format_double(rate);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    using detail::get_or;
    using detail::require_keys;
    ExperimentConfig cfg;
    require_keys(j, {"output_dir", "dataset", "noise", "trainer", "sweep"}, "");
    cfg.output_dir = get_or<std::string>(j, "output_dir", "", cfg.output_dir);

    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        require_keys(d,
                     {"kind", "classes", "per_class", "dim", "separation", "seed", "path",
                      "label_column", "test_fraction", "split_seed"},
                     "dataset");
        DatasetConfig& dc = cfg.dataset;
        dc.kind = get_or<std::string>(d, "kind", "dataset", dc.kind);
        if (dc.kind != "blobs" && dc.kind != "csv") {
            throw ConfigError("config: dataset.kind must be 'blobs' or 'csv', got '" + dc.kind +
                              "'");
        }
        dc.classes = get_or<int>(d, "classes", "dataset", dc.classes);
        dc.per_class = get_or<int>(d, "per_class", "dataset", dc.per_class);
        dc.dim = get_or<int>(d, "dim", "dataset", dc.dim);
        dc.separation = get_or<double>(d, "separation", "dataset", dc.separation);
        dc.seed = get_or<std::uint64_t>(d, "seed", "dataset", dc.seed);
        dc.path = get_or<std::string>(d, "path", "dataset", dc.path);
        dc.label_column = get_or<std::string>(d, "label_column", "dataset", dc.label_column);
        dc.test_fraction = get_or<double>(d, "test_fraction", "dataset", dc.test_fraction);
        dc.split_seed = get_or<std::uint64_t>(d, "split_seed", "dataset", dc.split_seed);
        if (dc.kind == "csv" && dc.path.empty()) {
            throw ConfigError("config: dataset.path is required for dataset.kind = csv");
        }
        if (dc.test_fraction < 0.0 || dc.test_fraction >= 1.0) {
            throw ConfigError("config: dataset.test_fraction must be in [0, 1)");
        }
    }

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        require_keys(n, {"kind", "rate", "seed"}, "noise");
        cfg.noise.kind = get_or<std::string>(n, "kind", "noise", cfg.noise.kind);
        if (cfg.noise.kind != "sym" && cfg.noise.kind != "pf" && cfg.noise.kind != "none") {
            throw ConfigError("config: noise.kind must be 'sym', 'pf' or 'none', got '" +
                              cfg.noise.kind + "'");
        }
        cfg.noise.rate = get_or<double>(n, "rate", "noise", cfg.noise.rate);
        cfg.noise.seed = get_or<std::uint64_t>(n, "seed", "noise", cfg.noise.seed);
        if (cfg.noise.rate < 0.0 || cfg.noise.rate >= 1.0) {
            throw ConfigError("config: noise.rate must be in [0, 1)");
        }
    }

    if (j.contains("trainer")) {
        const auto& t = j.at("trainer");
        require_keys(t,
                     {"method", "networks", "batch_size", "hidden", "epochs", "t_cut", "alpha",
                      "beta", "epsilon", "learning_rate", "beta1", "beta2", "adam_epsilon", "seed",
                      "t_revise", "self_ema_decay", "grad_norm_by_batch", "instrument_gradients",
                      "report_best_epoch", "parallel_networks", "save_networks"},
                     "trainer");
        TrainerConfig& tc = cfg.trainer;
        const std::string method = get_or<std::string>(t, "method", "trainer", "rcl");
        const auto parsed = parse_method(method);
        if (!parsed) {
            throw ConfigError("config: trainer.method '" + method +
                              "' is not one of standard, spl, decoupling, coteaching, lnec, "
                              "self, rcl, rcl_revise_restart");
        }
        tc.method = *parsed;
        tc.networks = get_or<int>(t, "networks", "trainer", tc.networks);
        tc.batch_size = get_or<int>(t, "batch_size", "trainer", tc.batch_size);
        tc.hidden = get_or<std::vector<int>>(t, "hidden", "trainer", tc.hidden);
        tc.schedule.t_max = get_or<int>(t, "epochs", "trainer", tc.schedule.t_max);
        tc.schedule.t_cut = get_or<int>(t, "t_cut", "trainer", tc.schedule.t_cut);
        tc.schedule.alpha = get_or<double>(t, "alpha", "trainer", tc.schedule.alpha);
        tc.schedule.beta = get_or<double>(t, "beta", "trainer", tc.schedule.beta);
        if (t.contains("epsilon") && !t.at("epsilon").is_null()) {
            cfg.trainer_epsilon = get_or<double>(t, "epsilon", "trainer", 0.0);
        }
        tc.optimizer.learning_rate =
            get_or<double>(t, "learning_rate", "trainer", tc.optimizer.learning_rate);
        tc.optimizer.beta1 = get_or<double>(t, "beta1", "trainer", tc.optimizer.beta1);
        tc.optimizer.beta2 = get_or<double>(t, "beta2", "trainer", tc.optimizer.beta2);
        tc.optimizer.epsilon = get_or<double>(t, "adam_epsilon", "trainer", tc.optimizer.epsilon);
        tc.master_seed = get_or<std::uint64_t>(t, "seed", "trainer", tc.master_seed);
        tc.t_revise = get_or<int>(t, "t_revise", "trainer", tc.t_revise);
        tc.self_ema_decay = get_or<double>(t, "self_ema_decay", "trainer", tc.self_ema_decay);
        tc.grad_norm_by_batch =
            get_or<bool>(t, "grad_norm_by_batch", "trainer", tc.grad_norm_by_batch);
        tc.instrument_gradients =
            get_or<bool>(t, "instrument_gradients", "trainer", tc.instrument_gradients);
        tc.report_best_epoch =
            get_or<bool>(t, "report_best_epoch", "trainer", tc.report_best_epoch);
        tc.parallel_networks =
            get_or<bool>(t, "parallel_networks", "trainer", tc.parallel_networks);
        tc.save_networks = get_or<bool>(t, "save_networks", "trainer", tc.save_networks);
    }

    if (j.contains("sweep") && !j.at("sweep").is_null()) {
        const auto& s = j.at("sweep");
        require_keys(s, {"methods", "networks", "rates", "betas", "seeds"}, "sweep");
        SweepConfig sw;
        sw.methods = get_or<std::vector<std::string>>(s, "methods", "sweep", {});
        for (const auto& m : sw.methods) {
            if (!parse_method(m)) throw ConfigError("config: sweep.methods contains unknown '" + m + "'");
        }
        sw.networks = get_or<std::vector<int>>(s, "networks", "sweep", {});
        sw.rates = get_or<std::vector<double>>(s, "rates", "sweep", {});
        sw.betas = get_or<std::vector<double>>(s, "betas", "sweep", {});
        sw.seeds = get_or<std::vector<std::uint64_t>>(s, "seeds", "sweep", {});
        cfg.sweep = sw;
    }

    // resolve the remember-rate epsilon and validate the trainer block eagerly
    cfg.trainer.schedule.epsilon = cfg.trainer_epsilon.value_or(cfg.noise.rate);
    try {
        cfg.trainer.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
    return parse_experiment_config(j);
}

// Resolved single-run config echo; reloadable by `run` to reproduce the run.
inline ordered_json config_echo(const ExperimentConfig& cfg) {
    ordered_json j;
    j["output_dir"] = cfg.output_dir;
    ordered_json d;
    d["kind"] = cfg.dataset.kind;
    if (cfg.dataset.kind == "blobs") {
        d["classes"] = cfg.dataset.classes;
        d["per_class"] = cfg.dataset.per_class;
        d["dim"] = cfg.dataset.dim;
        d["separation"] = cfg.dataset.separation;
        d["seed"] = cfg.dataset.seed;
    } else {
        d["path"] = cfg.dataset.path;
        d["label_column"] = cfg.dataset.label_column;
    }
    d["test_fraction"] = cfg.dataset.test_fraction;
    d["split_seed"] = cfg.dataset.split_seed;
    j["dataset"] = d;
    j["noise"] = {{"kind", cfg.noise.kind}, {"rate", cfg.noise.rate}, {"seed", cfg.noise.seed}};
    ordered_json t;
    t["method"] = method_name(cfg.trainer.method);
    t["networks"] = cfg.trainer.networks;
    t["batch_size"] = cfg.trainer.batch_size;
    t["hidden"] = cfg.trainer.hidden;
    t["epochs"] = cfg.trainer.schedule.t_max;
    t["t_cut"] = cfg.trainer.schedule.t_cut;
    t["alpha"] = cfg.trainer.schedule.alpha;
    t["beta"] = cfg.trainer.schedule.beta;
    t["epsilon"] = cfg.trainer.schedule.epsilon;
    t["learning_rate"] = cfg.trainer.optimizer.learning_rate;
    t["beta1"] = cfg.trainer.optimizer.beta1;
    t["beta2"] = cfg.trainer.optimizer.beta2;
    t["adam_epsilon"] = cfg.trainer.optimizer.epsilon;
    t["seed"] = cfg.trainer.master_seed;
    t["t_revise"] = cfg.trainer.t_revise;
    t["self_ema_decay"] = cfg.trainer.self_ema_decay;
    t["grad_norm_by_batch"] = cfg.trainer.grad_norm_by_batch;
    t["instrument_gradients"] = cfg.trainer.instrument_gradients;
    t["report_best_epoch"] = cfg.trainer.report_best_epoch;
    t["parallel_networks"] = cfg.trainer.parallel_networks;
    t["save_networks"] = cfg.trainer.save_networks;
    j["trainer"] = t;
    j["sweep"] = nullptr;
    return j;
}

// Builds (train, test) per the dataset + noise blocks. The split happens
// before noise injection; only the training side is corrupted.
inline std::pair<Dataset, Dataset> build_datasets(const ExperimentConfig& cfg) {
    Dataset full;
    if (cfg.dataset.kind == "blobs") {
        full = gen_blobs(cfg.dataset.classes, cfg.dataset.per_class, cfg.dataset.dim,
                         cfg.dataset.separation, cfg.dataset.seed);
    } else {
        full = load_csv(cfg.dataset.path, cfg.dataset.label_column);
    }
    auto [train_set, test_set] = split(full, cfg.dataset.test_fraction, cfg.dataset.split_seed);
    if (cfg.noise.kind != "none" && cfg.noise.rate > 0.0) {
        const NoiseSpec spec{cfg.noise.kind == "sym" ? NoiseKind::symmetric : NoiseKind::pair_flip,
                             cfg.noise.rate, cfg.noise.seed};
        for (const std::string& w : spec.warnings()) std::cerr << "warning: " << w << "\n";
        apply_noise(train_set, spec);
    }
    return {std::move(train_set), std::move(test_set)};
}

inline std::string run_dir_name(const ExperimentConfig& cfg) {
    std::string name = method_name(cfg.trainer.method);
    name += "_K" + std::to_string(cfg.trainer.networks);
    name += "_" + cfg.noise.kind + detail::format_rate_token(cfg.noise.rate);
    name += "_beta" + detail::format_rate_token(cfg.trainer.schedule.beta);
    name += "_seed" + std::to_string(cfg.trainer.master_seed);
    return name;
}

struct RunOutput {
    std::filesystem::path dir;
    RunMetrics metrics;
};

// Executes one configured run into <output_root>/<run name>/. Partial outputs
// are removed if the run fails.
inline RunOutput execute_run(const ExperimentConfig& cfg, const std::string& output_root) {
    namespace fs = std::filesystem;
    for (const std::string& w : cfg.trainer.schedule.warnings()) std::cerr << "warning: " << w << "\n";
    const fs::path dir = fs::path(output_root) / run_dir_name(cfg);
    fs::create_directories(dir);
    try {
        auto [train_set, test_set] = build_datasets(cfg);
        RunMetrics metrics = train(cfg.trainer, train_set, test_set);
        write_metrics_csv(metrics, (dir / "metrics.csv").string());
        write_timing_csv(metrics, (dir / "timing.csv").string());
        write_summary_json(metrics, config_echo(cfg), (dir / "summary.json").string());
        {
            std::ofstream out(dir / "config.json", std::ios::binary);
            out << config_echo(cfg).dump(2) << "\n";
            if (!out) throw std::runtime_error("run: failed to write config echo");
        }
        if (cfg.trainer.save_networks) {
            for (std::size_t k = 0; k < metrics.final_networks.size(); ++k) {
                save_network(metrics.final_networks[k],
                             (dir / ("network_" + std::to_string(k) + ".bin")).string());
            }
        }
        return {dir, std::move(metrics)};
    } catch (...) {
        std::error_code ec;
        fs::remove_all(dir, ec);
        throw;
    }
}

// --- sweep ---------------------------------------------------------------

struct SweepCell {
    ExperimentConfig config;
    std::string name;     // run directory name
    bool ok = false;
    std::string error;
};

// Expands the sweep cross-product. The networks dimension only applies to
// methods with a free K; fixed-K methods are normalized (and deduplicated) to
// their required network count.
inline std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base) {
    if (!base.sweep) throw ConfigError("sweep: config has no sweep block");
    const SweepConfig& sw = *base.sweep;
    const std::vector<std::string> methods =
        sw.methods.empty() ? std::vector<std::string>{method_name(base.trainer.method)}
                           : sw.methods;
    const std::vector<int> networks =
        sw.networks.empty() ? std::vector<int>{base.trainer.networks} : sw.networks;
    const std::vector<double> rates =
        sw.rates.empty() ? std::vector<double>{base.noise.rate} : sw.rates;
    const std::vector<double> betas =
        sw.betas.empty() ? std::vector<double>{base.trainer.schedule.beta} : sw.betas;
    const std::vector<std::uint64_t> seeds =
        sw.seeds.empty() ? std::vector<std::uint64_t>{base.trainer.master_seed} : sw.seeds;

    std::vector<ExperimentConfig> cells;
    std::set<std::string> seen;
    for (const std::string& m : methods) {
        for (int k : networks) {
            for (double rate : rates) {
                for (double beta : betas) {
                    for (std::uint64_t seed : seeds) {
                        ExperimentConfig c = base;
                        c.sweep.reset();
                        c.trainer.method = *parse_method(m);
                        switch (c.trainer.method) {
                            case Method::standard:
                            case Method::spl:
                            case Method::self_ensemble:
                                c.trainer.networks = 1;
                                break;
                            case Method::decoupling:
                            case Method::coteaching:
                                c.trainer.networks = 2;
                                break;
                            default:
                                c.trainer.networks = k;
                        }
                        c.noise.rate = rate;
                        c.trainer.schedule.beta = beta;
                        c.trainer.master_seed = seed;
                        c.trainer.schedule.epsilon = c.trainer_epsilon.value_or(rate);
                        c.trainer.validate();
                        const std::string name = run_dir_name(c);
                        if (seen.insert(name).second) cells.push_back(std::move(c));
                    }
                }
            }
        }
    }
    return cells;
}

struct SweepReport {
    std::vector<SweepCell> cells;
    std::filesystem::path aggregate_csv;
    std::filesystem::path significance_csv;
};

namespace detail {

struct CellKey {
    std::string method;
    int networks;
    std::string noise_kind;
    double rate;
    double beta;

    auto operator<=>(const CellKey&) const = default;
};

struct CellStats {
    std::vector<std::uint64_t> seeds;
    std::vector<double> accuracy;
    std::vector<double> pure_ratio;  // absent entries skipped
    bool any_failed = false;
};

}  // namespace detail

// Runs every cell (optionally with several worker threads; outputs are
// bitwise identical to serial execution), then aggregates by re-reading the
// per-run summaries from disk and writes aggregate.csv + significance.csv.
inline SweepReport run_sweep(const ExperimentConfig& base, const std::string& output_root,
                             int workers) {
    namespace fs = std::filesystem;
    std::vector<ExperimentConfig> expanded = expand_sweep(base);
    std::cout << "sweep: " << expanded.size() << " runs (cross-product)\n";

    std::vector<SweepCell> cells(expanded.size());
    for (std::size_t i = 0; i < expanded.size(); ++i) {
        cells[i].config = expanded[i];
        cells[i].name = run_dir_name(expanded[i]);
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                execute_run(cells[i].config, output_root);
                cells[i].ok = true;
            } catch (const std::exception& e) {
                cells[i].ok = false;
                cells[i].error = e.what();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const SweepCell& c : cells) {
        if (!c.ok) std::cerr << "sweep: run " << c.name << " failed: " << c.error << "\n";
    }

    // aggregate from the on-disk summaries (no hidden state)
    std::map<detail::CellKey, detail::CellStats> stats;
    for (const SweepCell& c : cells) {
        const detail::CellKey key{method_name(c.config.trainer.method), c.config.trainer.networks,
                                  c.config.noise.kind, c.config.noise.rate,
                                  c.config.trainer.schedule.beta};
        detail::CellStats& s = stats[key];
        if (!c.ok) {
            s.any_failed = true;
            continue;
        }
        std::ifstream in(fs::path(output_root) / c.name / "summary.json");
        nlohmann::json summary;
        in >> summary;
        s.seeds.push_back(c.config.trainer.master_seed);
        s.accuracy.push_back(summary.at("reported_accuracy").get<double>());
        if (!summary.at("mean_pure_ratio").is_null()) {
            s.pure_ratio.push_back(summary.at("mean_pure_ratio").get<double>());
        }
    }

    SweepReport report;
    report.cells = cells;
    report.aggregate_csv = fs::path(output_root) / "aggregate.csv";
    {
        CsvWriter out(report.aggregate_csv.string());
        out.write_row({"method", "networks", "noise_kind", "rate", "beta", "seeds", "mean_accuracy",
                       "std_accuracy", "mean_pure_ratio", "std_pure_ratio", "failed_runs"});
        for (const auto& [key, s] : stats) {
            std::vector<std::string> row{key.method,
                                         std::to_string(key.networks),
                                         key.noise_kind,
                                         format_double(key.rate),
                                         format_double(key.beta),
                                         std::to_string(s.seeds.size())};
            if (s.accuracy.empty()) {
                row.insert(row.end(), {"", "", "", ""});
            } else {
                row.push_back(format_double(mean(s.accuracy)));
                row.push_back(format_double(sample_std(s.accuracy)));
                if (s.pure_ratio.empty()) {
                    row.insert(row.end(), {"", ""});
                } else {
                    row.push_back(format_double(mean(s.pure_ratio)));
                    row.push_back(format_double(sample_std(s.pure_ratio)));
                }
            }
            row.push_back(s.any_failed ? "1" : "0");
            out.write_row(row);
        }
        out.close();
    }

    // significance: best proposed cell vs best baseline per (noise kind, rate),
    // one-sided paired t-test over seeds
    report.significance_csv = fs::path(output_root) / "significance.csv";
    {
        CsvWriter out(report.significance_csv.string());
        out.write_row({"noise_kind", "rate", "proposed", "proposed_networks", "proposed_beta",
                       "baseline", "baseline_networks", "proposed_mean", "baseline_mean", "delta",
                       "relative_improvement_pct", "t_stat", "p_value", "significant_at_0.05"});
        std::set<std::pair<std::string, double>> noise_cells;
        for (const auto& [key, s] : stats) noise_cells.insert({key.noise_kind, key.rate});
        for (const auto& [kind, rate] : noise_cells) {
            const detail::CellKey* best_prop = nullptr;
            const detail::CellKey* best_base = nullptr;
            double best_prop_acc = -1.0, best_base_acc = -1.0;
            for (const auto& [key, s] : stats) {
                if (key.noise_kind != kind || key.rate != rate || s.accuracy.empty()) continue;
                const bool proposed =
                    key.method == "rcl" || key.method == "rcl_revise_restart";
                const double m = mean(s.accuracy);
                if (proposed && m > best_prop_acc) {
                    best_prop_acc = m;
                    best_prop = &key;
                } else if (!proposed && m > best_base_acc) {
                    best_base_acc = m;
                    best_base = &key;
                }
            }
            if (!best_prop || !best_base) continue;
            const detail::CellStats& p = stats.at(*best_prop);
            const detail::CellStats& b = stats.at(*best_base);
            if (p.seeds != b.seeds || p.accuracy.size() < 2) continue;  // pairing requires aligned seeds
            const TTestResult t = paired_t_test_one_sided(p.accuracy, b.accuracy);
            const double delta = best_prop_acc - best_base_acc;
            out.write_row({kind, format_double(rate), best_prop->method,
                           std::to_string(best_prop->networks), format_double(best_prop->beta),
                           best_base->method, std::to_string(best_base->networks),
                           format_double(best_prop_acc), format_double(best_base_acc),
                           format_double(delta),
                           format_double(best_base_acc != 0.0 ? delta / best_base_acc * 100.0
                                                              : std::numeric_limits<double>::quiet_NaN()),
                           format_double(t.t_stat), format_double(t.p_value),
                           t.p_value < 0.05 ? "1" : "0"});
        }
        out.close();
    }
    return report;
}

}  // namespace rcl
