// SPDX-License-Identifier: Apache-2.0

#include "smomp/selftest.hpp"

#include "smomp/experiment.hpp"
#include "smomp/mmwave.hpp"
#include "smomp/momp.hpp"
#include "smomp/random_problem.hpp"
#include "smomp/scene.hpp"
#include "smomp/smomp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace smomp {

namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void audit_columns(ResidualAudit& a, const Eigen::MatrixXcd& atoms, const SparseSolution& sol, double obs_norm)
{
    ++a.solves;
    for (std::size_t k = 1; k < sol.residual_norms.size(); ++k)
        if (sol.residual_norms[k] > sol.residual_norms[k - 1] * (1.0 + 1e-12) + 1e-300) {
            ++a.monotone_failures;
            break;
        }
    if (atoms.cols() == 0 || obs_norm == 0.0)
        return;
    const double rel = (atoms.adjoint() * sol.residual).norm() / (atoms.norm() * obs_norm);
    a.worst_orthogonality = std::max(a.worst_orthogonality, rel);
    if (!(rel <= 1e-8))
        ++a.orthogonality_failures;
}

double relative_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

struct OmpResult {
    std::vector<std::size_t> support;
    Eigen::MatrixXcd coefficients;
};

// Plain OMP on an explicit matrix; ties within rounding go to the lower index.
OmpResult textbook_omp(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& y, std::size_t n_atoms)
{
    OmpResult out;
    Eigen::MatrixXcd r = y;
    std::vector<bool> used(static_cast<std::size_t>(a.cols()), false);
    for (std::size_t it = 0; it < n_atoms; ++it) {
        std::size_t best = 0;
        double best_score = -1.0;
        const double floor = r.squaredNorm();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (used[static_cast<std::size_t>(j)])
                continue;
            const double s = (a.col(j).adjoint() * r).squaredNorm() / a.col(j).squaredNorm();
            if (best_score < 0.0 || s > best_score + 1e-12 * std::max({best_score, s, floor})) {
                best = static_cast<std::size_t>(j);
                best_score = s;
            }
        }
        used[best] = true;
        out.support.push_back(best);
        Eigen::MatrixXcd sub(a.rows(), ix(out.support.size()));
        for (std::size_t s = 0; s < out.support.size(); ++s)
            sub.col(ix(s)) = a.col(ix(out.support[s]));
        out.coefficients = sub.householderQr().solve(y);
        r = y - sub * out.coefficients;
    }
    return out;
}

Eigen::Map<const Eigen::VectorXcd> flat(const ComplexTensor& t)
{
    return {t.data().data(), ix(t.size())};
}

std::vector<std::size_t> grid_atom(const ChannelPath& p, const ChannelScene& sc, const std::vector<Dictionary>& d)
{
    return {nearest_atom(d[0], p.arrival.x()), nearest_atom(d[1], p.arrival.y()),
            nearest_atom(d[2], p.departure.x()), nearest_atom(d[3], p.departure.y()),
            nearest_atom(d[4], p.delay - sc.clock_offset)};
}

SeparableProblem sound_and_assemble(const ChannelScene& sc, const SystemConfig& cfg,
                                    std::optional<std::uint64_t> noise_seed)
{
    auto frames = make_frames(cfg);
    const auto y = sound_channel(gen_channel_taps(sc, cfg), frames, cfg, noise_seed);
    return assemble_problem(whiten_frames(frames, y), frames, cfg);
}

} // namespace

void ResidualAudit::record(const SeparableProblem& p, const SparseSolution& sol)
{
    Eigen::MatrixXcd atoms(ix(p.observation_size()), ix(sol.support.size()));
    for (std::size_t s = 0; s < sol.support.size(); ++s)
        atoms.col(ix(s)) = separable_column(p.factors, sol.support[s].coords());
    audit_columns(*this, atoms, sol, flat(p.observation).norm());
}

void ResidualAudit::record(const DenseProblem& p, const SparseSolution& sol)
{
    Eigen::MatrixXcd atoms(p.observation.rows(), ix(sol.support.size()));
    for (std::size_t s = 0; s < sol.support.size(); ++s)
        atoms.col(ix(s)) = momp_combined_atom(p, sol.support[s].coords());
    audit_columns(*this, atoms, sol, p.observation.norm());
}

CheckResult ResidualAudit::result() const
{
    const bool ok = solves > 0 && monotone_failures == 0 && orthogonality_failures == 0;
    return {ok, std::to_string(solves) + " solves, " + std::to_string(monotone_failures) + " non-monotone, " +
                    std::to_string(orthogonality_failures) + " non-orthogonal, worst |A^H r|/(|A||O|) = " +
                    fmt("%.2e", worst_orthogonality)};
}

CheckResult check_oracle_equivalence(std::size_t instances, ResidualAudit& audit)
{
    const auto start = std::chrono::steady_clock::now();
    std::size_t same = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
        std::mt19937_64 rng(100000 + i);
        const SeparableProblem p = random_separable_problem(rng, RandomProblemShape{});
        SolverOptions opt;
        opt.n_atoms = std::min<std::size_t>(3, max_extractable_atoms(p));
        opt.refinement_sweeps = i % 3;
        const SparseSolution a = smomp_solve(p, opt);
        const DenseProblem dense = densify(p);
        const SparseSolution b = momp_solve(dense, opt);
        audit.record(p, a);
        audit.record(dense, b);
        if (a.support != b.support)
            continue;
        const double diff = a.coefficients.size() ? relative_diff(a.coefficients, b.coefficients) : 0.0;
        worst = std::max(worst, diff);
        if (diff <= 1e-8)
            ++same;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {same == instances && instances >= 100 && seconds < 60.0,
            std::to_string(same) + "/" + std::to_string(instances) + " identical supports with coefficients within " +
                "1e-8 (worst " + fmt("%.1e", worst) + "), " + fmt("%.2f", seconds) + " s"};
}

CheckResult check_omp_reduction(std::size_t instances, ResidualAudit& audit)
{
    std::size_t checked = 0, matched = 0;
    RandomProblemShape shape;
    shape.n_factors = 1;
    shape.max_dictionaries = 1;
    shape.max_atoms = 8;
    for (std::uint64_t seed = 0; checked < instances && seed < 50 * instances; ++seed) {
        std::mt19937_64 rng(200000 + seed);
        const SeparableProblem p = random_separable_problem(rng, shape);
        const std::size_t n = std::min<std::size_t>(3, max_extractable_atoms(p));
        // Fewer independent directions than atoms leaves exact ties.
        if (std::min(p.factors[0].signal_size(), p.observation_size()) <= n)
            continue;
        ++checked;
        const Eigen::MatrixXcd a = p.factors[0].matrix() * p.factors[0].dictionaries[0].entries;
        const Eigen::MatrixXcd y = densify(p).observation;
        const OmpResult ref = textbook_omp(a, y, n);
        SolverOptions opt;
        opt.n_atoms = n;
        opt.refinement_sweeps = 0;
        opt.rel_tol = 0.0;
        const SparseSolution sol = smomp_solve(p, opt);
        audit.record(p, sol);
        bool ok = sol.support.size() == n;
        for (std::size_t s = 0; ok && s < n; ++s)
            ok = sol.support[s][0] == ref.support[s];
        if (ok && relative_diff(sol.coefficients, ref.coefficients) < 1e-9)
            ++matched;
    }
    return {checked >= instances && matched == checked,
            std::to_string(matched) + "/" + std::to_string(checked) + " instances match textbook OMP atom-for-atom"};
}

CheckResult check_formulation_equivalence()
{
    SystemConfig cfg = system_preset("system1-desk");
    cfg.power_mw = 2.0;
    auto frames = make_frames(cfg);
    std::mt19937_64 rng(7);
    // Non-orthogonal combiners make the whitener non-trivial.
    for (std::size_t m1 = 0; m1 < cfg.rx_frames(); ++m1) {
        const Eigen::MatrixXcd w =
            frames[m1 * cfg.tx_frames()].combiner + 0.1 * random_complex_matrix(rng, cfg.rx_antennas(), cfg.rx_chains);
        for (std::size_t m2 = 0; m2 < cfg.tx_frames(); ++m2)
            frames[m1 * cfg.tx_frames() + m2].combiner = w;
    }
    const std::vector<Eigen::MatrixXcd> y(frames.size(),
                                          Eigen::MatrixXcd::Zero(ix(cfg.rx_chains), ix(cfg.training_length)));
    const auto w = whiten_frames(frames, y);
    const DenseProblem dense = densify(assemble_problem(w, frames, cfg));

    const std::size_t m2s = cfg.tx_frames(), mr = cfg.rx_chains, q_len = cfg.training_length;
    const std::size_t rows_rx = cfg.rx_frames() * mr;
    double worst = 0.0;
    std::size_t entries = 0;
    for (std::size_t m = 0; m < frames.size(); ++m) {
        const std::size_t m1 = m / m2s, m2 = m % m2s;
        const Eigen::MatrixXcd a = std::sqrt(cfg.power_mw) * frames[m].whitener.inverse() * frames[m].combiner.adjoint();
        const Eigen::MatrixXcd b = frames[m].precoder * frames[m].pilot;
        for (std::size_t r = 0; r < mr; ++r)
            for (std::size_t q = 0; q < q_len; ++q) {
                const std::size_t row = (m1 * mr + r) + (m2 * q_len + q) * rows_rx;
                for (std::size_t i1 = 0; i1 < cfg.rx_x; ++i1)
                    for (std::size_t i2 = 0; i2 < cfg.rx_y; ++i2)
                        for (std::size_t i3 = 0; i3 < cfg.tx_x; ++i3)
                            for (std::size_t i4 = 0; i4 < cfg.tx_y; ++i4)
                                for (std::size_t i5 = 0; i5 < cfg.taps; ++i5) {
                                    const cplx direct = a(ix(r), ix(i1 * cfg.rx_y + i2)) *
                                                        b(ix(i3 * cfg.tx_y + i4), ix(q + cfg.pre_pad - i5));
                                    worst = std::max(worst,
                                                     std::abs(direct - dense.measurement.at({row, i1, i2, i3, i4, i5})));
                                    ++entries;
                                }
            }
    }
    return {entries == dense.measurement.size() && worst < 1e-12,
            std::to_string(entries) + " entries, max |difference| = " + fmt("%.2e", worst)};
}

CheckResult check_exact_recovery(std::size_t seeds, ResidualAudit& audit)
{
    std::string detail;
    bool all = true;
    for (const char* preset : {"system1-desk", "system2-desk"}) {
        const SystemConfig cfg = system_preset(preset);
        const auto dicts = estimation_dictionaries(cfg);
        detail += std::string(detail.empty() ? "" : "; ") + preset + ":";
        for (std::size_t paths = 1; paths <= 3; ++paths) {
            std::size_t ok = 0;
            for (std::size_t seed = 0; seed < seeds; ++seed) {
                std::mt19937_64 rng(300000 + seed);
                SceneOptions opt;
                opt.n_paths = paths;
                opt.on_grid = true;
                opt.min_separation = 2.0;
                const ChannelScene sc = generate_scene(cfg, opt, rng);
                const SeparableProblem p = sound_and_assemble(sc, cfg, std::nullopt);
                SolverOptions so;
                so.n_atoms = paths;
                so.rel_tol = 0.0;
                const SparseSolution sol = smomp_solve(p, so);
                audit.record(p, sol);
                std::vector<MultiIndex> truth, got = sol.support;
                for (const auto& path : sc.paths)
                    truth.emplace_back(grid_atom(path, sc, dicts));
                std::sort(truth.begin(), truth.end());
                std::sort(got.begin(), got.end());
                const double obs = flat(p.observation).norm();
                if (got == truth && sol.residual_norms.back() < 1e-8 * obs)
                    ++ok;
            }
            all = all && ok == seeds;
            detail += " L" + std::to_string(paths) + " " + std::to_string(ok) + "/" + std::to_string(seeds);
        }
    }
    return {all, detail};
}

CheckResult check_memory_contract()
{
    const SystemConfig cfg = system_preset("system1-desk");
    std::mt19937_64 rng(400000);
    SceneOptions opt;
    opt.n_paths = 3;
    const ChannelScene sc = generate_scene(cfg, opt, rng);
    const SeparableProblem p = sound_and_assemble(sc, cfg, 1);
    SolverOptions so;
    so.n_atoms = 3;
    const SparseSolution sol = smomp_solve(p, so);
    const std::size_t dense = densified_bytes(p);
    const double ratio = static_cast<double>(sol.peak_aux_bytes) / static_cast<double>(dense);
    return {ratio < 0.05, "SMOMP peak auxiliary " + std::to_string(sol.peak_aux_bytes) + " B vs dense measurement " +
                              std::to_string(dense) + " B (" + fmt("%.2f", 100.0 * ratio) + "%)"};
}

CheckResult check_speed_ordering(std::size_t repetitions)
{
    ExperimentConfig cfg;
    cfg.solver = SolverChoice::both;
    cfg.scene.n_paths = 3;
    cfg.powers_dbm = {20.0};
    cfg.bench_repetitions = repetitions;
    const auto rows = benchmark_solvers(cfg);
    double smomp = -1.0, momp = -1.0;
    for (const auto& r : rows) {
        if (!r.runnable)
            continue;
        (r.solver == "smomp" ? smomp : momp) = r.median_seconds;
    }
    const bool ok = smomp >= 0.0 && momp >= 0.0 && smomp < momp;
    return {ok, "median over " + std::to_string(repetitions) + ": SMOMP " + fmt("%.4f", smomp) + " s, MOMP " +
                    fmt("%.4f", momp) + " s (includes densification)"};
}

CheckResult check_whitening(std::size_t samples)
{
    SystemConfig cfg;
    cfg.tx_x = cfg.tx_y = 1;
    cfg.tx_chains = 1;
    cfg.rx_x = 1;
    cfg.rx_y = 3;
    cfg.rx_chains = 3;
    cfg.taps = 1;
    cfg.pre_pad = 0;
    cfg.post_pad = 0;
    cfg.training_length = samples;
    cfg.noise_mw = 0.25;
    SoundingFrame fr;
    fr.combiner.resize(3, 3);
    fr.combiner << cplx(1, 0), cplx(0.5, 0.2), cplx(0, 0), cplx(0, 0), cplx(1, 0), cplx(0.3, -0.1), cplx(0.2, 0.4),
        cplx(0, 0), cplx(0.8, 0);
    fr.precoder = Eigen::MatrixXcd::Ones(1, 1);
    fr.pilot = Eigen::MatrixXcd::Zero(1, ix(samples));
    std::vector<SoundingFrame> frames{fr};
    const ChannelTaps taps(1, Eigen::MatrixXcd::Zero(3, 1));
    const auto y = sound_channel(taps, frames, cfg, 2024);
    const auto w = whiten_frames(frames, y);
    const Eigen::MatrixXcd cov = w[0] * w[0].adjoint() / static_cast<double>(samples);
    const Eigen::MatrixXcd target = cfg.noise_mw * Eigen::MatrixXcd::Identity(3, 3);
    const double rel = (cov - target).norm() / target.norm();
    return {rel <= 0.05, std::to_string(samples) + " samples, |C - noise I|/|noise I| = " + fmt("%.4f", rel)};
}

CheckResult check_localization(std::size_t seeds)
{
    const SystemConfig cfg = system_preset("system1-desk");
    const std::size_t n_atoms = cfg.oversampling * std::min(cfg.rx_x, cfg.rx_y);
    std::size_t within = 0;
    double worst = 0.0;
    for (std::size_t seed = 0; seed < seeds; ++seed) {
        std::mt19937_64 rng(500000 + seed);
        SceneOptions opt;
        opt.on_grid = true;
        const ChannelScene sc = generate_scene(cfg, opt, rng);
        SolverOptions so;
        so.n_atoms = 1;
        const auto est = extract_paths(smomp_solve(sound_and_assemble(sc, cfg, std::nullopt), so), cfg);
        if (est.empty())
            continue;
        const auto pos = estimate_position(est[0], sc.rx_position, sc.rx_orientation, sc.clock_offset);
        const double range = (sc.tx_position - sc.rx_position).norm();
        const double bound = kSpeedOfLight * cfg.sample_period / 2.0 + range * 2.0 / static_cast<double>(n_atoms);
        if (pos.valid) {
            const double err = (pos.position - sc.tx_position).norm();
            worst = std::max(worst, err);
            within += err <= bound ? 1 : 0;
        }
    }

    ExperimentConfig sweep;
    sweep.powers_dbm = {-10.0, 10.0, 30.0};
    sweep.trials = 40;
    sweep.scene.n_paths = 1;
    sweep.seed = 6;
    const CampaignReport rep = run_campaign(sweep);
    std::vector<double> medians;
    for (double power : sweep.powers_dbm) {
        std::vector<double> v;
        for (const auto& r : rep.trials)
            if (r.power_dbm == power)
                v.push_back(r.position_error_m.value_or(std::numeric_limits<double>::infinity()));
        std::sort(v.begin(), v.end());
        medians.push_back(v[v.size() / 2]);
    }
    std::size_t inversions = 0;
    for (std::size_t i = 1; i < medians.size(); ++i)
        inversions += medians[i] > medians[i - 1] ? 1 : 0;
    const bool trend = inversions <= 1 && medians.back() < medians.front();
    std::string sweep_text;
    for (std::size_t i = 0; i < medians.size(); ++i)
        sweep_text += (i ? ", " : "") + fmt("%.3g", medians[i]);
    return {within == seeds && trend, std::to_string(within) + "/" + std::to_string(seeds) +
                                          " on-grid positions within the grid bound (worst " + fmt("%.2e", worst) +
                                          " m); median error at -10/10/30 dBm: " + sweep_text + " m"};
}

CheckResult check_determinism(const std::filesystem::path& scratch)
{
    ExperimentConfig cfg;
    cfg.trials = 6;
    cfg.powers_dbm = {0.0, 20.0};
    cfg.scene.n_paths = 2;
    cfg.seed = 77;
    std::string text[2];
    for (int run = 0; run < 2; ++run) {
        const auto dir = scratch / ("run" + std::to_string(run));
        write_campaign(run_campaign(cfg), cfg, dir);
        std::ifstream in(dir / "trials.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        text[run] = ss.str();
    }
    const bool ok = !text[0].empty() && text[0] == text[1];
    return {ok, std::to_string(text[0].size()) + " bytes, runs " + (ok ? "identical" : "differ")};
}

} // namespace smomp
