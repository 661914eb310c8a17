// SPDX-License-Identifier: Apache-2.0
//
// Configuration-driven Monte-Carlo campaigns and solver benchmarks for the
// mmWave channel-estimation pipeline.
//
// Config files are JSON objects with a mandatory "schema_version" (currently
// 1). Every other key is optional; unknown keys are rejected. See README.md
// for the full schema.

#pragma once

#include "smomp/mmwave.hpp"
#include "smomp/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smomp {

inline constexpr int kConfigSchemaVersion = 1;

// "system1-desk", "system2-desk", "system1", "system2". Throws ConfigError
// for any other name.
SystemConfig system_preset(const std::string& name);
std::vector<std::string> preset_names();

enum class SolverChoice { smomp, momp, both };
SolverChoice parse_solver(const std::string& name);
std::string solver_name(SolverChoice s);

struct ExperimentConfig {
    std::string preset = "system1-desk";
    SystemConfig system = system_preset("system1-desk");
    double noise_dbm = -81.0;
    SceneOptions scene{};
    std::vector<double> powers_dbm{0.0, 10.0, 20.0, 30.0};
    std::size_t trials = 20;
    bool noiseless = false;
    SolverChoice solver = SolverChoice::smomp;
    // 0 means one atom per generated path.
    std::size_t n_atoms = 0;
    std::size_t refinement_sweeps = 1;
    double rel_tol = 1e-6;
    std::size_t subcarriers = 64;
    std::size_t streams = 1;
    std::uint64_t seed = 1;
    std::size_t budget_mb = 64;
    std::size_t bench_repetitions = 10;

    std::size_t atoms() const { return n_atoms == 0 ? scene.n_paths : n_atoms; }
    std::size_t budget_bytes() const { return budget_mb << 20; }

    // Throws ConfigError before any work is done.
    void validate() const;
};

// Parses a JSON config document. Throws ConfigError with the offending key.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
// Canonical JSON echo of a config (used in summary.json).
std::string experiment_config_json(const ExperimentConfig& cfg);

// Per-trial seed: splitmix64 applied to master + counter * golden gamma.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

struct TrialRecord {
    double power_dbm = 0.0;
    std::size_t trial = 0;
    std::uint64_t scene_seed = 0;
    std::string solver;
    std::optional<double> angular_error_deg; // absent when the estimate is not a visible direction
    std::optional<double> delay_error_s;
    std::optional<double> nmse_db; // -inf for a perfect estimate
    double se_estimated = 0.0;
    double se_perfect = 0.0;
    bool position_valid = false;
    std::optional<double> position_error_m;
    std::size_t peak_aux_bytes = 0;
    double solve_seconds = 0.0; // reported in the summary only
};

struct CampaignReport {
    std::vector<TrialRecord> trials; // ordered by (power, trial, solver)
    std::vector<std::string> warnings;
};

// Runs the campaign in memory. Trials run in parallel; results do not depend
// on the thread count.
CampaignReport run_campaign(const ExperimentConfig& cfg);

// Writes trials.csv and summary.json into `out_dir` (created if missing).
void write_campaign(const CampaignReport& report, const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Fixed column order of trials.csv.
std::string trials_csv_header();
std::string trials_csv(const CampaignReport& report);

struct BenchRow {
    std::string solver;
    bool runnable = true;
    double median_seconds = 0.0;
    std::size_t peak_aux_bytes = 0;
    std::size_t dense_bytes = 0;    // analytic size of the densified measurement
    std::size_t formula_rows = 0;   // Q N_R N_T / M_T
    std::size_t formula_cols = 0;   // N_T N_R D
};

// Times both solvers on one noisy instance at the first configured power.
// MOMP is marked not runnable when its dense measurement exceeds the budget.
std::vector<BenchRow> benchmark_solvers(const ExperimentConfig& cfg);
std::string bench_csv(const std::vector<BenchRow>& rows);

} // namespace smomp
