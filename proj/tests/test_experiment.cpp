// SPDX-License-Identifier: Apache-2.0

#include "smomp/errors.hpp"
#include "smomp/experiment.hpp"
#include "smomp/momp.hpp"
#include "smomp/selftest.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace smomp;

namespace {

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const char* name)
{
    const auto dir = std::filesystem::temp_directory_path() / "smomp_test_experiment" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.trials = 3;
    cfg.powers_dbm = {0.0, 20.0};
    cfg.scene.n_paths = 2;
    return cfg;
}

} // namespace

TEST_CASE("presets")
{
    const auto s1 = system_preset("system1");
    CHECK(s1.tx_x == 4);
    CHECK(s1.tx_chains == 4);
    CHECK(s1.rx_x == 8);
    CHECK(s1.rx_chains == 8);
    CHECK(s1.taps == 64);
    CHECK(s1.training_length == 64);
    CHECK(s1.oversampling == 512);
    CHECK(s1.pre_pad == 64);
    CHECK(s1.post_pad == 32);
    const auto s2 = system_preset("system2");
    CHECK(s2.tx_y == 8);
    CHECK(s2.rx_y == 16);
    CHECK(s2.rx_chains == 16);
    for (const auto& name : preset_names())
        CHECK_NOTHROW(system_preset(name).validate());
    CHECK_THROWS_AS(system_preset("system3"), ConfigError);
}

TEST_CASE("config parsing")
{
    SUBCASE("defaults and overrides")
    {
        const auto cfg = parse_experiment_config(R"({
            "schema_version": 1, "preset": "system2-desk",
            "system": {"noise_dbm": -70, "pilot_mode": "per_frame", "pulse": {"kind": "raised_cosine", "rolloff": 0.25}},
            "scene": {"n_paths": 2, "on_grid": true},
            "powers_dbm": [5, 15], "trials": 7, "solver": "both", "seed": 42, "budget_mb": 512})");
        CHECK(cfg.system.rx_x == 8);
        CHECK(cfg.noise_dbm == -70.0);
        CHECK(cfg.system.pilot_mode == PilotMode::per_frame);
        CHECK(cfg.system.pulse.kind == PulseKind::raised_cosine);
        CHECK(cfg.system.pulse.rolloff == 0.25);
        CHECK(cfg.scene.n_paths == 2);
        CHECK(cfg.scene.on_grid);
        CHECK(cfg.powers_dbm == std::vector<double>{5.0, 15.0});
        CHECK(cfg.trials == 7);
        CHECK(cfg.solver == SolverChoice::both);
        CHECK(cfg.seed == 42);
        CHECK(cfg.atoms() == 2);
        CHECK(cfg.budget_bytes() == std::size_t{512} << 20);
    }
    SUBCASE("round trip through the canonical echo")
    {
        auto cfg = small_config();
        cfg.seed = 9;
        cfg.solver = SolverChoice::momp;
        const auto again = parse_experiment_config(experiment_config_json(cfg));
        CHECK(experiment_config_json(again) == experiment_config_json(cfg));
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(parse_experiment_config("{"), ConfigError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"preset": "system1-desk"})"), ConfigError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"schema_version": 2})"), ConfigError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"schema_version": 1, "trails": 3})"), ConfigError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"schema_version": 1, "trials": "many"})"), ConfigError);
        CHECK_THROWS_AS(parse_experiment_config(R"({"schema_version": 1, "solver": "lasso"})"), ConfigError);
        // Structural parse succeeds; the invariant check happens in validate.
        const auto bad = parse_experiment_config(R"({"schema_version": 1, "system": {"tx_chains": 3}})");
        CHECK_THROWS_AS(bad.validate(), ConfigError);
        CHECK_THROWS_AS(run_campaign(bad), ConfigError);
    }
}

TEST_CASE("config validation")
{
    auto cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.subcarriers = 4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.system.training_length = 6;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    SUBCASE("MOMP is refused exactly when the dense measurement exceeds the budget")
    {
        ExperimentConfig c;
        c.solver = SolverChoice::momp;
        // system1-desk needs exactly 2 MiB.
        c.budget_mb = 2;
        CHECK_NOTHROW(c.validate());
        c.budget_mb = 1;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c.solver = SolverChoice::smomp;
        CHECK_NOTHROW(c.validate());
    }
}

TEST_CASE("seed derivation")
{
    // Reference values of the splitmix64 generator seeded with 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(derive_seed(0, 1) == splitmix64(0x9e3779b97f4a7c15ULL));
    CHECK(derive_seed(5, 0) != derive_seed(5, 1));
}

TEST_CASE("run_campaign")
{
    SUBCASE("zero trials gives an empty report with a warning")
    {
        auto cfg = small_config();
        cfg.trials = 0;
        const auto rep = run_campaign(cfg);
        CHECK(rep.trials.empty());
        CHECK(rep.warnings.size() == 1);
    }
    SUBCASE("rows, ordering and finiteness")
    {
        auto cfg = small_config();
        cfg.solver = SolverChoice::both;
        const auto rep = run_campaign(cfg);
        REQUIRE(rep.trials.size() == 2 * 3 * 2);
        CHECK(rep.trials[0].solver == "smomp");
        CHECK(rep.trials[1].solver == "momp");
        CHECK(rep.trials[2].trial == 1);
        CHECK(rep.trials.back().power_dbm == 20.0);
        for (const auto& r : rep.trials) {
            CHECK(std::isfinite(r.se_estimated));
            CHECK(r.se_perfect >= r.se_estimated - 1e-12);
            CHECK(r.position_valid == r.position_error_m.has_value());
            if (r.angular_error_deg)
                CHECK(std::isfinite(*r.angular_error_deg));
        }
        // Scenes repeat across powers.
        CHECK(rep.trials[0].scene_seed == rep.trials[6].scene_seed);
    }
    SUBCASE("same seed gives byte-identical files; a different seed does not")
    {
        const auto cfg = small_config();
        const auto a = scratch("a"), b = scratch("b"), c = scratch("c");
        write_campaign(run_campaign(cfg), cfg, a);
        write_campaign(run_campaign(cfg), cfg, b);
        auto other = cfg;
        other.seed = 2;
        write_campaign(run_campaign(other), other, c);
        const auto csv = read_file(a / "trials.csv");
        CHECK(csv.rfind(trials_csv_header() + "\n", 0) == 0);
        CHECK(csv == read_file(b / "trials.csv"));
        CHECK(csv != read_file(c / "trials.csv"));
        CHECK(std::filesystem::exists(a / "summary.json"));
    }
    SUBCASE("noiseless on-grid single-path scenes are estimated within the grid spacing")
    {
        ExperimentConfig cfg;
        cfg.noiseless = true;
        cfg.scene.on_grid = true;
        cfg.powers_dbm = {20.0};
        cfg.trials = 20;
        const auto rep = run_campaign(cfg);
        const double spacing =
            std::asin(2.0 / static_cast<double>(cfg.system.oversampling * cfg.system.rx_x)) * 180.0 / std::numbers::pi;
        for (const auto& r : rep.trials) {
            REQUIRE(r.angular_error_deg.has_value());
            CHECK(*r.angular_error_deg <= spacing);
            CHECK(r.nmse_db.has_value());
            CHECK(*r.nmse_db < -100.0);
        }
    }
}

TEST_CASE("benchmark_solvers")
{
    SUBCASE("desk preset runs both solvers and reports the dense size")
    {
        ExperimentConfig cfg;
        cfg.solver = SolverChoice::both;
        cfg.bench_repetitions = 2;
        const auto rows = benchmark_solvers(cfg);
        REQUIRE(rows.size() == 2);
        for (const auto& r : rows) {
            CHECK(r.runnable);
            CHECK(r.formula_rows == 8 * 16 * 4 / 2);
            CHECK(r.formula_cols == 4 * 16 * 8);
            CHECK(r.dense_bytes == r.formula_rows * r.formula_cols * 16);
        }
        CHECK(rows[0].peak_aux_bytes < rows[0].dense_bytes);
        const auto csv = bench_csv(rows);
        CHECK(csv.find("smomp,1,") != std::string::npos);
    }
    SUBCASE("over-budget MOMP is marked not runnable without allocating")
    {
        ExperimentConfig cfg;
        cfg.solver = SolverChoice::both;
        cfg.bench_repetitions = 1;
        cfg.budget_mb = 1;
        const auto rows = benchmark_solvers(cfg);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].runnable);
        CHECK_FALSE(rows[1].runnable);
        CHECK(bench_csv(rows).find("momp,0,not runnable") != std::string::npos);
    }
}

TEST_CASE("verification suites")
{
    ResidualAudit audit;
    CHECK(check_oracle_equivalence(100, audit).pass);
    CHECK(check_omp_reduction(100, audit).pass);
    CHECK(check_formulation_equivalence().pass);
    CHECK(check_memory_contract().pass);
    CHECK(check_whitening(10000).pass);
    CHECK(audit.result().pass);
}
