// Experiment runner CLI.
//
//   rcl-lab run <config.json> [--seed N] [--out DIR] [--workers W]
//   rcl-lab sweep <config.json> [--workers W] [--out DIR]
//   rcl-lab inject --input data.csv --label-column y --kind pf --rate 0.45
//                  --seed 3 --out noisy.csv
//   rcl-lab plot-data <run_dir> [--out DIR]
//   rcl-lab fuse-debug --peers "1,2,3;2,3,4" --rate 0.5 --seed 7 [--batch N]
//
// Exit codes: 0 success, 2 configuration error, 1 runtime error.
// RCL_OUT_ROOT overrides the configured output root; --out overrides both.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "rcl/experiment.hpp"
#include "rcl/fusion.hpp"
#include "rcl/run_io.hpp"

namespace {

std::string resolve_output_root(const std::string& config_dir, const std::string& out_flag) {
    if (!out_flag.empty()) return out_flag;
    if (const char* env = std::getenv("RCL_OUT_ROOT"); env != nullptr && *env != '\0') return env;
    return config_dir.empty() ? "runs" : config_dir;
}

std::vector<rcl::SelectionSet> parse_peer_sets(const std::string& spec) {
    std::vector<rcl::SelectionSet> peers;
    rcl::SelectionSet current;
    std::string token;
    auto flush_token = [&]() {
        if (token.empty()) return;
        current.indices.push_back(std::stoi(token));
        token.clear();
    };
    for (char c : spec) {
        if (c == ',') {
            flush_token();
        } else if (c == ';') {
            flush_token();
            peers.push_back(current);
            current.indices.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            token += c;
        }
    }
    flush_token();
    if (!current.indices.empty()) peers.push_back(current);
    for (auto& p : peers) std::sort(p.indices.begin(), p.indices.end());
    return peers;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust collaborative learning lab: noisy-label trainers, sweeps, and analysis"};
    app.require_subcommand(1);

    std::string config_path, out_flag;
    std::optional<std::uint64_t> seed_flag;
    int workers = 1;

    auto* run_cmd = app.add_subcommand("run", "Execute a single configured run");
    run_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--seed", seed_flag, "override trainer seed");
    run_cmd->add_option("--out", out_flag, "output root directory");
    run_cmd->add_option("--workers", workers, "network-parallel phases when > 1");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run the sweep cross-product");
    sweep_cmd->add_option("config", config_path, "experiment config with sweep block")->required();
    sweep_cmd->add_option("--workers", workers, "concurrent runs");
    sweep_cmd->add_option("--out", out_flag, "output root directory");
    sweep_cmd->add_option("--seed", seed_flag, "override base trainer seed");

    std::string inject_input, inject_label, inject_kind = "sym", inject_out;
    double inject_rate = 0.0;
    std::uint64_t inject_seed = 1;
    auto* inject_cmd = app.add_subcommand("inject", "Corrupt a dataset CSV with label noise");
    inject_cmd->add_option("--input", inject_input, "input CSV")->required();
    inject_cmd->add_option("--label-column", inject_label, "label column name (plain CSVs)");
    inject_cmd->add_option("--kind", inject_kind, "sym or pf")->check(CLI::IsMember({"sym", "pf"}));
    inject_cmd->add_option("--rate", inject_rate, "noise rate in [0, 1)")->required();
    inject_cmd->add_option("--seed", inject_seed, "noise seed");
    inject_cmd->add_option("--out", inject_out, "output snapshot CSV")->required();

    std::string plot_run_dir;
    auto* plot_cmd = app.add_subcommand("plot-data", "Export tidy plot CSVs from a finished run");
    plot_cmd->add_option("run_dir", plot_run_dir, "run directory with metrics.csv")->required();
    plot_cmd->add_option("--out", out_flag, "output directory (default: the run dir)");

    std::string fuse_peers;
    double fuse_rate = 0.0;
    std::uint64_t fuse_seed = 1;
    int fuse_batch = 0;
    auto* fuse_cmd = app.add_subcommand("fuse-debug", "Run one knowledge fusion and print JSON");
    fuse_cmd->add_option("--peers", fuse_peers, "peer selections, e.g. \"1,2,3;2,3,4\"")->required();
    fuse_cmd->add_option("--rate", fuse_rate, "fusion rate in [0, 1]")->required();
    fuse_cmd->add_option("--seed", fuse_seed, "sampling stream seed");
    fuse_cmd->add_option("--batch", fuse_batch, "batch size (default: max index + 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            rcl::ExperimentConfig cfg = rcl::load_experiment_config(config_path);
            if (seed_flag) cfg.trainer.master_seed = *seed_flag;
            if (workers > 1) cfg.trainer.parallel_networks = true;
            const std::string root = resolve_output_root(cfg.output_dir, out_flag);
            const rcl::RunOutput out = rcl::execute_run(cfg, root);
            std::cout << "run: " << out.dir.string()
                      << " reported_accuracy=" << rcl::format_double(out.metrics.reported_accuracy)
                      << "\n";
            return 0;
        }
        if (sweep_cmd->parsed()) {
            rcl::ExperimentConfig cfg = rcl::load_experiment_config(config_path);
            if (seed_flag) cfg.trainer.master_seed = *seed_flag;
            const std::string root = resolve_output_root(cfg.output_dir, out_flag);
            const rcl::SweepReport report = rcl::run_sweep(cfg, root, workers);
            std::cout << "sweep: wrote " << report.aggregate_csv.string() << " and "
                      << report.significance_csv.string() << "\n";
            return 0;
        }
        if (inject_cmd->parsed()) {
            const rcl::NoiseSpec spec{
                inject_kind == "sym" ? rcl::NoiseKind::symmetric : rcl::NoiseKind::pair_flip,
                inject_rate, inject_seed};
            spec.validate();
            for (const std::string& w : spec.warnings()) std::cerr << "warning: " << w << "\n";
            rcl::Dataset ds = rcl::load_csv(inject_input, inject_label);
            rcl::apply_noise(ds, spec);
            rcl::save_csv(ds, inject_out);
            std::cout << "inject: wrote " << inject_out << " (realized noise rate "
                      << rcl::format_double(ds.realized_noise_rate()) << ")\n";
            return 0;
        }
        if (plot_cmd->parsed()) {
            const std::string out_dir = out_flag.empty() ? plot_run_dir : out_flag;
            rcl::write_plot_data(plot_run_dir, out_dir);
            std::cout << "plot-data: wrote 4 CSVs to " << out_dir << "\n";
            return 0;
        }
        if (fuse_cmd->parsed()) {
            const auto peers = parse_peer_sets(fuse_peers);
            if (peers.empty()) throw rcl::ConfigError("fuse-debug: no peer sets given");
            int max_index = 0;
            for (const auto& p : peers)
                for (int i : p.indices) max_index = std::max(max_index, i);
            const std::size_t batch =
                fuse_batch > 0 ? static_cast<std::size_t>(fuse_batch)
                               : static_cast<std::size_t>(max_index) + 1;
            rcl::Rng rng(fuse_seed);
            const rcl::FusionOutcome outcome = rcl::knowledge_fusion(peers, fuse_rate, rng, batch);
            nlohmann::ordered_json j;
            j["agree"] = outcome.agree.indices;
            j["uncertain"] = outcome.uncertain.indices;
            j["admitted"] = outcome.admitted.indices;
            j["fused"] = outcome.fused.indices;
            j["n_in"] = outcome.n_in;
            std::cout << j.dump(2) << "\n";
            return 0;
        }
    } catch (const rcl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
