// SPDX-License-Identifier: Apache-2.0
//
// smomp-eval: experiment campaigns, solver benchmarks and the oracle
// self-test.

#include "smomp/errors.hpp"
#include "smomp/experiment.hpp"
#include "smomp/selftest.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string solver;
    std::optional<std::size_t> budget_mb;
};

smomp::ExperimentConfig resolve(const Flags& f)
{
    smomp::ExperimentConfig cfg = f.config.empty() ? smomp::ExperimentConfig{} : smomp::load_experiment_config(f.config);
    if (f.seed)
        cfg.seed = *f.seed;
    if (!f.solver.empty())
        cfg.solver = smomp::parse_solver(f.solver);
    if (f.budget_mb)
        cfg.budget_mb = *f.budget_mb;
    return cfg;
}

void add_common(CLI::App* app, Flags& f)
{
    app->add_option("--config", f.config, "JSON experiment config (schema_version 1)")->check(CLI::ExistingFile);
    app->add_option("--seed", f.seed, "Master seed (overrides the config)");
    app->add_option("--out", f.out, "Output directory");
    app->add_option("--solver", f.solver, "smomp, momp or both")
        ->check(CLI::IsMember({"smomp", "momp", "both"}));
    app->add_option("--budget-mb", f.budget_mb, "Memory budget for the dense MOMP measurement");
}

int run(const Flags& f)
{
    const auto cfg = resolve(f);
    const auto report = smomp::run_campaign(cfg);
    for (const auto& w : report.warnings)
        std::cerr << "warning: " << w << "\n";
    smomp::write_campaign(report, cfg, f.out);
    std::cout << "wrote " << report.trials.size() << " trial rows to " << f.out << "/trials.csv and summary.json\n";
    return 0;
}

int bench(const Flags& f)
{
    auto cfg = resolve(f);
    if (f.solver.empty())
        cfg.solver = smomp::SolverChoice::both;
    const auto rows = smomp::benchmark_solvers(cfg);
    const std::string csv = smomp::bench_csv(rows);
    std::filesystem::create_directories(f.out);
    std::ofstream(std::filesystem::path(f.out) / "bench.csv", std::ios::binary) << csv;
    std::cout << csv;
    for (const auto& r : rows)
        if (!r.runnable)
            std::cout << r.solver << ": not runnable, dense measurement needs " << r.dense_bytes << " B over the "
                      << cfg.budget_mb << " MiB budget\n";
    return 0;
}

int selftest()
{
    smomp::ResidualAudit audit;
    const std::pair<const char*, smomp::CheckResult> checks[] = {
        {"oracle equivalence", smomp::check_oracle_equivalence(120, audit)},
        {"OMP reduction", smomp::check_omp_reduction(100, audit)},
        {"formulation equivalence", smomp::check_formulation_equivalence()},
        {"residual properties", audit.result()},
    };
    bool all = true;
    for (const auto& [name, r] : checks) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SMOMP mmWave channel-estimation evaluation"};
    app.require_subcommand(1);
    Flags run_flags, bench_flags;
    auto* run_cmd = app.add_subcommand("run", "Monte-Carlo campaign: trials.csv and summary.json");
    add_common(run_cmd, run_flags);
    auto* bench_cmd = app.add_subcommand("bench", "SMOMP vs MOMP time and memory: bench.csv");
    add_common(bench_cmd, bench_flags);
    auto* self_cmd = app.add_subcommand("selftest", "Oracle-equivalence suite");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run_cmd->parsed())
            return run(run_flags);
        if (bench_cmd->parsed())
            return bench(bench_flags);
        if (self_cmd->parsed())
            return selftest();
    } catch (const smomp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
