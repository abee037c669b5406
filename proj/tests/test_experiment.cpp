#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rcl/experiment.hpp"
#include "rcl/run_io.hpp"

using namespace rcl;
namespace fs = std::filesystem;

namespace {

nlohmann::json minimal_config() {
    return nlohmann::json::parse(R"({
        "output_dir": "runs",
        "dataset": {"kind": "blobs", "classes": 3, "per_class": 60, "dim": 2,
                    "separation": 5.0, "seed": 4, "test_fraction": 0.25, "split_seed": 2},
        "noise": {"kind": "pf", "rate": 0.3, "seed": 6},
        "trainer": {"method": "standard", "networks": 1, "batch_size": 32,
                    "hidden": [6], "epochs": 3, "t_cut": 2, "seed": 9}
    })");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing accepts the minimal example") {
    const ExperimentConfig cfg = parse_experiment_config(minimal_config());
    CHECK(cfg.dataset.classes == 3);
    CHECK(cfg.noise.rate == 0.3);
    CHECK(cfg.trainer.method == Method::standard);
    CHECK(cfg.trainer.schedule.epsilon == 0.3);  // defaults to the noise rate
}

TEST_CASE("config parsing rejects unknown keys with the key path") {
    auto j = minimal_config();
    j["trainer"]["metod"] = "rcl";
    CHECK_THROWS_WITH(parse_experiment_config(j),
                      Catch::Matchers::ContainsSubstring("trainer.metod"));

    auto j2 = minimal_config();
    j2["datasett"] = 1;
    CHECK_THROWS_WITH(parse_experiment_config(j2),
                      Catch::Matchers::ContainsSubstring("datasett"));

    auto j3 = minimal_config();
    j3["sweep"] = {{"methodz", nlohmann::json::array()}};
    CHECK_THROWS_WITH(parse_experiment_config(j3),
                      Catch::Matchers::ContainsSubstring("sweep.methodz"));
}

TEST_CASE("config parsing rejects bad values by name") {
    auto j = minimal_config();
    j["trainer"]["method"] = "rclx";
    CHECK_THROWS_WITH(parse_experiment_config(j), Catch::Matchers::ContainsSubstring("rclx"));

    auto j2 = minimal_config();
    j2["noise"]["kind"] = "gauss";
    CHECK_THROWS_WITH(parse_experiment_config(j2), Catch::Matchers::ContainsSubstring("gauss"));

    auto j3 = minimal_config();
    j3["noise"]["rate"] = 1.5;
    CHECK_THROWS_WITH(parse_experiment_config(j3),
                      Catch::Matchers::ContainsSubstring("noise.rate"));

    auto j4 = minimal_config();
    j4["trainer"]["method"] = "rcl";
    j4["trainer"]["networks"] = 1;  // rcl requires K >= 2
    CHECK_THROWS_AS(parse_experiment_config(j4), ConfigError);

    auto j5 = minimal_config();
    j5["dataset"]["kind"] = "csv";  // missing path
    CHECK_THROWS_WITH(parse_experiment_config(j5),
                      Catch::Matchers::ContainsSubstring("dataset.path"));
}

TEST_CASE("trainer epsilon override decouples the schedule from the noise block") {
    auto j = minimal_config();
    j["trainer"]["epsilon"] = 0.2;
    const ExperimentConfig cfg = parse_experiment_config(j);
    CHECK(cfg.trainer.schedule.epsilon == 0.2);
    CHECK(cfg.noise.rate == 0.3);
}

TEST_CASE("execute_run writes the full artifact set and a summary in range") {
    TempDir tmp("rcl_run_artifacts");
    const ExperimentConfig cfg = parse_experiment_config(minimal_config());
    const RunOutput out = execute_run(cfg, tmp.path.string());
    CHECK(fs::exists(out.dir / "metrics.csv"));
    CHECK(fs::exists(out.dir / "timing.csv"));
    CHECK(fs::exists(out.dir / "summary.json"));
    CHECK(fs::exists(out.dir / "config.json"));

    const auto summary = nlohmann::json::parse(slurp(out.dir / "summary.json"));
    const double acc = summary.at("reported_accuracy").get<double>();
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(summary.at("config").at("trainer").at("method") == "standard");
}

TEST_CASE("config echo round-trip reproduces the run bitwise") {
    TempDir tmp("rcl_echo_roundtrip");
    const ExperimentConfig cfg = parse_experiment_config(minimal_config());
    const RunOutput first = execute_run(cfg, (tmp.path / "a").string());

    // reload the echoed config and run it into a different root
    const ExperimentConfig echoed = load_experiment_config((first.dir / "config.json").string());
    const RunOutput second = execute_run(echoed, (tmp.path / "b").string());

    CHECK(slurp(first.dir / "metrics.csv") == slurp(second.dir / "metrics.csv"));
    CHECK(slurp(first.dir / "summary.json") == slurp(second.dir / "summary.json"));
}

TEST_CASE("execute_run removes partial outputs on failure") {
    TempDir tmp("rcl_partial_cleanup");
    ExperimentConfig cfg = parse_experiment_config(minimal_config());
    cfg.dataset.kind = "csv";
    cfg.dataset.path = "/nonexistent/data.csv";
    cfg.dataset.label_column = "y";
    CHECK_THROWS(execute_run(cfg, tmp.path.string()));
    CHECK_FALSE(fs::exists(tmp.path / run_dir_name(cfg)));
}

TEST_CASE("save_networks writes loadable parameter snapshots") {
    TempDir tmp("rcl_save_networks");
    auto j = minimal_config();
    j["trainer"]["save_networks"] = true;
    const ExperimentConfig cfg = parse_experiment_config(j);
    const RunOutput out = execute_run(cfg, tmp.path.string());
    REQUIRE(fs::exists(out.dir / "network_0.bin"));
    const NetworkParams net = load_network((out.dir / "network_0.bin").string());
    CHECK(net == out.metrics.final_networks[0]);
}

TEST_CASE("sweep expansion normalizes fixed-K methods and deduplicates") {
    auto j = minimal_config();
    j["trainer"]["method"] = "rcl";
    j["trainer"]["networks"] = 3;
    j["sweep"] = {{"methods", {"standard", "rcl"}},
                  {"networks", {3, 5}},
                  {"seeds", {1, 2}}};
    const ExperimentConfig cfg = parse_experiment_config(j);
    const auto cells = expand_sweep(cfg);
    // standard collapses K to 1 (deduplicated): 1 method-K cell x 2 seeds
    // rcl keeps K in {3, 5}: 2 cells x 2 seeds
    CHECK(cells.size() == 6);
}

TEST_CASE("sweep writes aggregate rows and is identical serial vs parallel") {
    auto j = minimal_config();
    j["trainer"]["epochs"] = 2;
    j["sweep"] = {{"methods", {"standard", "spl"}}, {"seeds", {1, 2}}};
    const ExperimentConfig cfg = parse_experiment_config(j);

    TempDir serial_dir("rcl_sweep_serial");
    TempDir parallel_dir("rcl_sweep_parallel");
    const SweepReport serial = run_sweep(cfg, serial_dir.path.string(), 1);
    const SweepReport parallel = run_sweep(cfg, parallel_dir.path.string(), 4);

    CHECK(serial.cells.size() == 4);  // 2 methods x 2 seeds
    const CsvTable agg = read_csv(serial.aggregate_csv.string());
    CHECK(agg.rows.size() == 2);  // one row per (method, K, noise, beta) cell
    CHECK(slurp(serial.aggregate_csv) == slurp(parallel.aggregate_csv));
    CHECK(slurp(serial.significance_csv) == slurp(parallel.significance_csv));
}

TEST_CASE("sweep aggregate equals recomputation from the per-run summaries") {
    auto j = minimal_config();
    j["trainer"]["epochs"] = 2;
    j["sweep"] = {{"methods", {"standard"}}, {"seeds", {1, 2, 3}}};
    const ExperimentConfig cfg = parse_experiment_config(j);
    TempDir tmp("rcl_sweep_recompute");
    const SweepReport report = run_sweep(cfg, tmp.path.string(), 1);

    std::vector<double> accs;
    for (const SweepCell& c : report.cells) {
        const auto summary = nlohmann::json::parse(slurp(tmp.path / c.name / "summary.json"));
        accs.push_back(summary.at("reported_accuracy").get<double>());
    }
    const CsvTable agg = read_csv(report.aggregate_csv.string());
    REQUIRE(agg.rows.size() == 1);
    const int mean_col = agg.column("mean_accuracy");
    double mean_val = 0.0;
    REQUIRE(parse_double(agg.rows[0][static_cast<std::size_t>(mean_col)], mean_val));
    CHECK(mean_val == Catch::Approx(mean(accs)).margin(1e-12));
}

TEST_CASE("sweep significance report compares rcl against the best baseline") {
    auto j = minimal_config();
    j["trainer"]["epochs"] = 3;
    j["trainer"]["method"] = "rcl";
    j["trainer"]["networks"] = 2;
    j["sweep"] = {{"methods", {"standard", "rcl"}}, {"seeds", {1, 2, 3}}};
    const ExperimentConfig cfg = parse_experiment_config(j);
    TempDir tmp("rcl_sweep_sig");
    const SweepReport report = run_sweep(cfg, tmp.path.string(), 2);
    const CsvTable sig = read_csv(report.significance_csv.string());
    REQUIRE(sig.rows.size() == 1);
    CHECK(sig.rows[0][static_cast<std::size_t>(sig.column("proposed"))] == "rcl");
    CHECK(sig.rows[0][static_cast<std::size_t>(sig.column("baseline"))] == "standard");
    double p = -1.0;
    REQUIRE(parse_double(sig.rows[0][static_cast<std::size_t>(sig.column("p_value"))], p));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
}

TEST_CASE("plot-data exports the four tidy CSVs matching the run") {
    TempDir tmp("rcl_plotdata");
    auto j = minimal_config();
    j["trainer"]["method"] = "rcl";
    j["trainer"]["networks"] = 2;
    j["trainer"]["epochs"] = 4;
    const ExperimentConfig cfg = parse_experiment_config(j);
    const RunOutput out = execute_run(cfg, tmp.path.string());
    write_plot_data(out.dir.string(), (tmp.path / "plots").string());

    for (const char* name : {"accuracy_vs_epoch.csv", "pure_ratio_vs_epoch.csv",
                             "gradient_norm.csv", "schedule.csv"}) {
        CHECK(fs::exists(tmp.path / "plots" / name));
    }

    // schedule curve matches the closed forms row by row
    const CsvTable sched = read_csv((tmp.path / "plots" / "schedule.csv").string());
    REQUIRE(sched.rows.size() == 4);
    for (const auto& row : sched.rows) {
        int epoch = 0;
        double remember = 0.0, fusion = 0.0;
        epoch = std::stoi(row[0]);
        REQUIRE(parse_double(row[2], remember));
        REQUIRE(parse_double(row[3], fusion));
        CHECK(remember == remember_rate(epoch, cfg.trainer.schedule));
        CHECK(fusion == fusion_rate(epoch, cfg.trainer.schedule));
    }

    // tidy accuracy table has one row per (epoch, network)
    const CsvTable acc = read_csv((tmp.path / "plots" / "accuracy_vs_epoch.csv").string());
    CHECK(acc.rows.size() == 8);  // 4 epochs x 2 networks

    CHECK_THROWS_WITH(write_plot_data((tmp.path / "nope").string(), tmp.path.string()),
                      Catch::Matchers::ContainsSubstring("missing run artifact"));
}

TEST_CASE("inject with zero rate preserves labels and adds oracle columns") {
    TempDir tmp("rcl_inject_zero");
    // write a small plain CSV
    const fs::path input = tmp.path / "plain.csv";
    {
        std::ofstream out(input);
        out << "x0,x1,y\n0.5,1.5,0\n2.5,3.5,1\n4.5,5.5,2\n";
    }
    Dataset ds = load_csv(input.string(), "y");
    apply_noise(ds, {NoiseKind::symmetric, 0.0, 3});
    const fs::path output = tmp.path / "noisy.csv";
    save_csv(ds, output.string());

    const CsvTable out_table = read_csv(output.string());
    CHECK(out_table.header ==
          std::vector<std::string>{"x0", "x1", "observed", "true", "clean"});
    const CsvTable in_table = read_csv(input.string());
    REQUIRE(out_table.rows.size() == in_table.rows.size());
    for (std::size_t i = 0; i < out_table.rows.size(); ++i) {
        // features and labels equal the input, modulo added oracle columns
        CHECK(out_table.rows[i][0] == in_table.rows[i][0]);
        CHECK(out_table.rows[i][1] == in_table.rows[i][1]);
        CHECK(out_table.rows[i][2] == in_table.rows[i][2]);  // observed == y
        CHECK(out_table.rows[i][3] == in_table.rows[i][2]);  // true == y
        CHECK(out_table.rows[i][4] == "1");
    }
}

TEST_CASE("csv datasets without oracle report pure ratio as absent") {
    TempDir tmp("rcl_no_oracle");
    const fs::path input = tmp.path / "plain.csv";
    {
        std::ofstream out(input);
        for (int i = 0; i < 40; ++i) {
            const int y = i % 2;
            out << (i == 0 ? "x0,x1,y\n" : "");
            out << (y ? 1.0 + 0.05 * i : -1.0 - 0.05 * i) << "," << 0.1 * i << "," << y << "\n";
        }
    }
    ExperimentConfig cfg = parse_experiment_config(minimal_config());
    cfg.dataset.kind = "csv";
    cfg.dataset.path = input.string();
    cfg.dataset.label_column = "y";
    cfg.noise.kind = "none";
    cfg.trainer.schedule.epsilon = 0.2;  // treated as a plain hyperparameter
    const RunOutput out = execute_run(cfg, tmp.path.string());
    const auto summary = nlohmann::json::parse(slurp(out.dir / "summary.json"));
    CHECK(summary.at("mean_pure_ratio").is_null());
    CHECK(summary.at("train_noise_rate").is_null());
}
