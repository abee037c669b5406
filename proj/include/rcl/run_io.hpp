// Run artifacts. Every run directory holds:
//   metrics.csv   per-epoch log, deterministic bytes for a fixed config+seed
//   timing.csv    per-epoch wall time (informational, excluded from
//                 determinism guarantees)
//   summary.json  final/best accuracy, mean pure ratio, revision info, and
//                 the resolved config echo
// plot-data reshapes metrics.csv into tidy per-series CSVs.
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcl/csv.hpp"
#include "rcl/trainers.hpp"

namespace rcl {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string metric_field(double v) { return is_absent(v) ? std::string{} : format_double(v); }

}  // namespace detail

inline void write_metrics_csv(const RunMetrics& run, const std::string& path) {
    CsvWriter out(path);
    std::vector<std::string> row = {"epoch", "schedule_epoch", "remember_rate", "fusion_rate"};
    for (int k = 0; k < run.networks; ++k) row.push_back("test_accuracy_" + std::to_string(k));
    for (int k = 0; k < run.networks; ++k) row.push_back("pure_ratio_" + std::to_string(k));
    for (int k = 0; k < run.networks; ++k) row.push_back("selected_count_" + std::to_string(k));
    row.insert(row.end(), {"noisy_gn", "noisy_gn_split", "accum_noisy_gn", "noisy_train_accuracy"});
    out.write_row(row);
    for (const EpochLog& e : run.epochs) {
        row.clear();
        row.push_back(std::to_string(e.epoch));
        row.push_back(std::to_string(e.schedule_epoch));
        row.push_back(format_double(e.remember));
        row.push_back(format_double(e.fusion));
        for (double a : e.test_accuracy) row.push_back(format_double(a));
        for (double p : e.pure_ratio) row.push_back(detail::metric_field(p));
        for (long long c : e.trained_count) row.push_back(std::to_string(c));
        row.push_back(detail::metric_field(e.noisy_gn));
        row.push_back(detail::metric_field(e.noisy_gn_split));
        row.push_back(detail::metric_field(e.accum_noisy_gn));
        row.push_back(detail::metric_field(e.noisy_train_accuracy));
        out.write_row(row);
    }
    out.close();
}

inline void write_timing_csv(const RunMetrics& run, const std::string& path) {
    CsvWriter out(path);
    out.write_row({"epoch", "wall_ms"});
    for (const EpochLog& e : run.epochs) {
        out.write_row({std::to_string(e.epoch), format_double(e.wall_ms)});
    }
    out.close();
}

inline ordered_json summary_json(const RunMetrics& run, const ordered_json& config_echo) {
    auto opt = [](double v) {
        return is_absent(v) ? ordered_json(nullptr) : ordered_json(v);
    };
    ordered_json j;
    j["epochs"] = run.epochs.size();
    j["networks"] = run.networks;
    j["final_accuracy"] = run.final_accuracy;
    j["best_accuracy"] = run.best_accuracy;
    j["best_epoch"] = run.best_epoch;
    j["reported_accuracy"] = run.reported_accuracy;
    j["mean_pure_ratio"] = opt(run.mean_pure_ratio);
    j["final_pure_ratio"] = opt(run.final_pure_ratio);
    j["train_noise_rate"] = opt(run.train_noise_rate);
    if (run.revision) {
        const RevisionInfo& r = *run.revision;
        j["revision"] = {{"epoch", r.epoch},
                         {"unselected", r.unselected},
                         {"changed", r.changed},
                         {"revised_noise_rate", opt(r.revised_noise_rate)},
                         {"noise_rate_before", opt(r.noise_rate_before)},
                         {"noise_rate_after", opt(r.noise_rate_after)}};
    } else {
        j["revision"] = nullptr;
    }
    j["config"] = config_echo;
    return j;
}

inline void write_summary_json(const RunMetrics& run, const ordered_json& config_echo,
                               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_summary_json: cannot open " + path);
    out << summary_json(run, config_echo).dump(2) << "\n";
    if (!out) throw std::runtime_error("write_summary_json: write failed for " + path);
}

// --- plot data -----------------------------------------------------------

// Reshapes a finished run's metrics.csv into tidy per-series CSVs:
// accuracy_vs_epoch.csv, pure_ratio_vs_epoch.csv (epoch, network, value),
// gradient_norm.csv and schedule.csv (one row per epoch).
inline void write_plot_data(const std::string& run_dir, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const std::string metrics_path = (fs::path(run_dir) / "metrics.csv").string();
    if (!fs::exists(metrics_path)) {
        throw std::runtime_error("plot-data: missing run artifact " + metrics_path);
    }
    const CsvTable table = read_csv(metrics_path);
    fs::create_directories(out_dir);

    std::vector<int> acc_cols, pure_cols;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i].starts_with("test_accuracy_")) acc_cols.push_back(static_cast<int>(i));
        if (table.header[i].starts_with("pure_ratio_")) pure_cols.push_back(static_cast<int>(i));
    }
    const int epoch_col = table.column("epoch");
    if (epoch_col < 0 || acc_cols.empty()) {
        throw std::runtime_error("plot-data: " + metrics_path + " lacks expected columns");
    }

    {
        CsvWriter out((fs::path(out_dir) / "accuracy_vs_epoch.csv").string());
        out.write_row({"epoch", "network", "test_accuracy"});
        for (const auto& r : table.rows) {
            for (std::size_t k = 0; k < acc_cols.size(); ++k) {
                out.write_row({r[static_cast<std::size_t>(epoch_col)], std::to_string(k),
                               r[static_cast<std::size_t>(acc_cols[k])]});
            }
        }
        out.close();
    }
    {
        CsvWriter out((fs::path(out_dir) / "pure_ratio_vs_epoch.csv").string());
        out.write_row({"epoch", "network", "pure_ratio"});
        for (const auto& r : table.rows) {
            for (std::size_t k = 0; k < pure_cols.size(); ++k) {
                out.write_row({r[static_cast<std::size_t>(epoch_col)], std::to_string(k),
                               r[static_cast<std::size_t>(pure_cols[k])]});
            }
        }
        out.close();
    }
    {
        CsvWriter out((fs::path(out_dir) / "gradient_norm.csv").string());
        out.write_row({"epoch", "noisy_gn", "noisy_gn_split", "accum_noisy_gn"});
        const int gn = table.column("noisy_gn");
        const int gns = table.column("noisy_gn_split");
        const int agn = table.column("accum_noisy_gn");
        for (const auto& r : table.rows) {
            out.write_row({r[static_cast<std::size_t>(epoch_col)], r[static_cast<std::size_t>(gn)],
                           r[static_cast<std::size_t>(gns)], r[static_cast<std::size_t>(agn)]});
        }
        out.close();
    }
    {
        CsvWriter out((fs::path(out_dir) / "schedule.csv").string());
        out.write_row({"epoch", "schedule_epoch", "remember_rate", "fusion_rate"});
        const int se = table.column("schedule_epoch");
        const int rr = table.column("remember_rate");
        const int fr = table.column("fusion_rate");
        for (const auto& r : table.rows) {
            out.write_row({r[static_cast<std::size_t>(epoch_col)], r[static_cast<std::size_t>(se)],
                           r[static_cast<std::size_t>(rr)], r[static_cast<std::size_t>(fr)]});
        }
        out.close();
    }
}

}  // namespace rcl
