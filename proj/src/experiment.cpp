// SPDX-License-Identifier: Apache-2.0

#include "smomp/experiment.hpp"

#include "smomp/errors.hpp"
#include "smomp/metrics.hpp"
#include "smomp/momp.hpp"
#include "smomp/smomp.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace smomp {

namespace {

using json = nlohmann::ordered_json;

std::string fmt_double(double v)
{
    if (std::isinf(v))
        return v < 0 ? "-inf" : "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

// JSON has no infinities; non-finite values become strings.
json json_number(double v)
{
    if (std::isfinite(v))
        return v;
    return fmt_double(v);
}

std::size_t dense_measurement_bytes(const SystemConfig& s, std::size_t* rows, std::size_t* cols)
{
    const std::size_t r = s.rx_frames() * s.rx_chains * s.tx_frames() * s.training_length;
    const std::size_t c = s.rx_antennas() * s.tx_antennas() * s.taps;
    if (rows)
        *rows = r;
    if (cols)
        *cols = c;
    return r * c * sizeof(cplx);
}

std::vector<SolverChoice> solvers_of(SolverChoice c)
{
    if (c == SolverChoice::both)
        return {SolverChoice::smomp, SolverChoice::momp};
    return {c};
}

// Instance shared by all solvers of one trial.
struct Instance {
    SystemConfig system;
    ChannelScene scene;
    ChannelTaps taps;
    SeparableProblem problem;
};

Instance make_instance(const ExperimentConfig& cfg, double power_dbm, std::uint64_t scene_seed,
                       std::optional<std::uint64_t> noise_seed)
{
    Instance in;
    in.system = cfg.system;
    in.system.power_mw = dbm_to_mw(power_dbm);
    in.system.noise_mw = dbm_to_mw(cfg.noise_dbm);
    std::mt19937_64 rng(scene_seed);
    in.scene = generate_scene(in.system, cfg.scene, rng);
    in.taps = gen_channel_taps(in.scene, in.system);
    auto frames = make_frames(in.system);
    const auto y = sound_channel(in.taps, frames, in.system, noise_seed);
    const auto w = whiten_frames(frames, y);
    in.problem = assemble_problem(w, frames, in.system);
    return in;
}

SolverOptions solver_options(const ExperimentConfig& cfg, bool parallel)
{
    SolverOptions o;
    o.n_atoms = cfg.atoms();
    o.refinement_sweeps = cfg.refinement_sweeps;
    o.rel_tol = cfg.rel_tol;
    o.parallel = parallel;
    return o;
}

SparseSolution solve(const Instance& in, SolverChoice which, const ExperimentConfig& cfg, bool parallel,
                     double* seconds)
{
    const auto start = std::chrono::steady_clock::now();
    SparseSolution sol;
    if (which == SolverChoice::smomp) {
        sol = smomp_solve(in.problem, solver_options(cfg, parallel));
    } else {
        const DenseProblem dense = densify(in.problem, cfg.budget_bytes());
        sol = momp_solve(dense, solver_options(cfg, parallel));
    }
    *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

TrialRecord evaluate(const Instance& in, const SparseSolution& sol, const ExperimentConfig& cfg)
{
    TrialRecord r;
    r.peak_aux_bytes = sol.peak_aux_bytes;
    const auto est = extract_paths(sol, in.system);
    const ChannelTaps est_taps = estimated_taps(est, in.system);
    r.nmse_db = channel_nmse(in.taps, est_taps);
    r.se_perfect = spectral_efficiency(in.taps, in.taps, in.system, cfg.subcarriers, cfg.streams);
    r.se_estimated = spectral_efficiency(in.taps, est_taps, in.system, cfg.subcarriers, cfg.streams);
    if (est.empty() || in.scene.paths.empty())
        return r;

    const auto strongest = std::max_element(
        in.scene.paths.begin(), in.scene.paths.end(),
        [](const ChannelPath& a, const ChannelPath& b) { return std::abs(a.gain) < std::abs(b.gain); });
    if (const auto dir = est[0].arrival())
        r.angular_error_deg = angular_error(strongest->arrival, *dir);
    r.delay_error_s = std::abs(est[0].delay - (strongest->delay - in.scene.clock_offset));
    if (in.scene.line_of_sight) {
        const auto pos = estimate_position(est[0], in.scene.rx_position, in.scene.rx_orientation,
                                           in.scene.clock_offset);
        r.position_valid = pos.valid;
        if (pos.valid)
            r.position_error_m = (pos.position - in.scene.tx_position).norm();
    }
    return r;
}

double percentile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi || v[lo] == v[hi])
        return v[lo];
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

json stats(const std::vector<double>& v)
{
    json j;
    j["count"] = v.size();
    if (v.empty())
        return j;
    double sum = 0.0;
    for (double x : v)
        sum += x;
    j["mean"] = json_number(sum / static_cast<double>(v.size()));
    j["median"] = json_number(percentile(v, 0.5));
    j["p10"] = json_number(percentile(v, 0.1));
    j["p90"] = json_number(percentile(v, 0.9));
    return j;
}

template <class T>
void read_key(const json& obj, const char* key, T& out)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
    }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where)
{
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

void read_system(const json& s, SystemConfig& sys, double& noise_dbm)
{
    if (!s.is_object())
        throw ConfigError("config: 'system' must be an object");
    reject_unknown(s,
                   {"tx_x", "tx_y", "rx_x", "rx_y", "tx_chains", "rx_chains", "training_length", "taps",
                    "noise_dbm", "sample_period", "oversampling", "pre_pad", "post_pad", "pilot_mode", "pulse"},
                   "system");
    read_key(s, "tx_x", sys.tx_x);
    read_key(s, "tx_y", sys.tx_y);
    read_key(s, "rx_x", sys.rx_x);
    read_key(s, "rx_y", sys.rx_y);
    read_key(s, "tx_chains", sys.tx_chains);
    read_key(s, "rx_chains", sys.rx_chains);
    read_key(s, "training_length", sys.training_length);
    read_key(s, "taps", sys.taps);
    read_key(s, "noise_dbm", noise_dbm);
    read_key(s, "sample_period", sys.sample_period);
    sys.pulse.sample_period = sys.sample_period;
    read_key(s, "oversampling", sys.oversampling);
    read_key(s, "pre_pad", sys.pre_pad);
    read_key(s, "post_pad", sys.post_pad);
    if (s.contains("pilot_mode")) {
        std::string mode;
        read_key(s, "pilot_mode", mode);
        if (mode == "identical")
            sys.pilot_mode = PilotMode::identical;
        else if (mode == "per_frame")
            sys.pilot_mode = PilotMode::per_frame;
        else
            throw ConfigError("config: pilot_mode must be 'identical' or 'per_frame'");
    }
    if (s.contains("pulse")) {
        const json& p = s.at("pulse");
        if (!p.is_object())
            throw ConfigError("config: 'pulse' must be an object");
        reject_unknown(p, {"kind", "rolloff"}, "pulse");
        std::string kind = "sinc";
        read_key(p, "kind", kind);
        if (kind == "sinc")
            sys.pulse.kind = PulseKind::sinc;
        else if (kind == "raised_cosine")
            sys.pulse.kind = PulseKind::raised_cosine;
        else
            throw ConfigError("config: pulse kind must be 'sinc' or 'raised_cosine'");
        read_key(p, "rolloff", sys.pulse.rolloff);
    }
}

void read_scene(const json& s, SceneOptions& opt)
{
    if (!s.is_object())
        throw ConfigError("config: 'scene' must be an object");
    reject_unknown(s,
                   {"n_paths", "on_grid", "min_separation", "separated_dims", "reflection_loss", "carrier_hz",
                    "user_height", "max_attempts"},
                   "scene");
    read_key(s, "n_paths", opt.n_paths);
    read_key(s, "on_grid", opt.on_grid);
    read_key(s, "min_separation", opt.min_separation);
    read_key(s, "separated_dims", opt.separated_dims);
    read_key(s, "reflection_loss", opt.reflection_loss);
    read_key(s, "carrier_hz", opt.carrier_hz);
    read_key(s, "user_height", opt.user_height);
    read_key(s, "max_attempts", opt.max_attempts);
}

} // namespace

SystemConfig system_preset(const std::string& name)
{
    SystemConfig s;
    if (name == "system1-desk")
        return s;
    if (name == "system2-desk") {
        s.tx_x = s.tx_y = s.tx_chains = 4;
        s.rx_x = s.rx_y = s.rx_chains = 8;
        return s;
    }
    if (name == "system1" || name == "system2") {
        const bool two = name == "system2";
        s.tx_x = s.tx_y = s.tx_chains = two ? 8 : 4;
        s.rx_x = s.rx_y = s.rx_chains = two ? 16 : 8;
        s.taps = 64;
        s.training_length = 64;
        s.oversampling = 512;
        s.pre_pad = 64;
        s.post_pad = 32;
        return s;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"system1-desk", "system2-desk", "system1", "system2"}; }

SolverChoice parse_solver(const std::string& name)
{
    if (name == "smomp")
        return SolverChoice::smomp;
    if (name == "momp")
        return SolverChoice::momp;
    if (name == "both")
        return SolverChoice::both;
    throw ConfigError("solver must be smomp, momp or both (got '" + name + "')");
}

std::string solver_name(SolverChoice s)
{
    switch (s) {
    case SolverChoice::smomp:
        return "smomp";
    case SolverChoice::momp:
        return "momp";
    case SolverChoice::both:
        return "both";
    }
    return "?";
}

void ExperimentConfig::validate() const
{
    SystemConfig probe = system;
    probe.power_mw = 1.0;
    probe.noise_mw = dbm_to_mw(noise_dbm);
    probe.validate();
    if (scene.n_paths == 0)
        throw ConfigError("config: scene.n_paths must be positive");
    if (scene.separated_dims > 5)
        throw ConfigError("config: scene.separated_dims must be at most 5");
    if (subcarriers < system.taps)
        throw ConfigError("config: subcarriers must be at least the number of taps");
    if (streams == 0)
        throw ConfigError("config: streams must be positive");
    if (bench_repetitions == 0)
        throw ConfigError("config: bench_repetitions must be positive");
    if (!(rel_tol >= 0.0))
        throw ConfigError("config: rel_tol must be non-negative");
    for (double p : powers_dbm)
        if (!std::isfinite(p))
            throw ConfigError("config: powers_dbm entries must be finite");
    if (solver != SolverChoice::smomp) {
        const std::size_t bytes = dense_measurement_bytes(system, nullptr, nullptr);
        if (bytes > budget_bytes())
            throw ConfigError("config: MOMP needs a " + std::to_string(bytes >> 20) +
                              " MiB dense measurement, over the " + std::to_string(budget_mb) +
                              " MiB budget; use --solver smomp or raise --budget-mb");
    }
}

ExperimentConfig parse_experiment_config(const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config: top level must be an object");
    if (!doc.contains("schema_version"))
        throw ConfigError("config: missing schema_version");
    int version = 0;
    read_key(doc, "schema_version", version);
    if (version != kConfigSchemaVersion)
        throw ConfigError("config: unsupported schema_version " + std::to_string(version));
    reject_unknown(doc,
                   {"schema_version", "preset", "system", "scene", "powers_dbm", "trials", "noiseless", "solver",
                    "n_atoms", "refinement_sweeps", "rel_tol", "subcarriers", "streams", "seed", "budget_mb",
                    "bench_repetitions"},
                   "top level");

    ExperimentConfig cfg;
    read_key(doc, "preset", cfg.preset);
    cfg.system = system_preset(cfg.preset);
    if (doc.contains("system"))
        read_system(doc.at("system"), cfg.system, cfg.noise_dbm);
    if (doc.contains("scene"))
        read_scene(doc.at("scene"), cfg.scene);
    read_key(doc, "powers_dbm", cfg.powers_dbm);
    read_key(doc, "trials", cfg.trials);
    read_key(doc, "noiseless", cfg.noiseless);
    if (doc.contains("solver")) {
        std::string s;
        read_key(doc, "solver", s);
        cfg.solver = parse_solver(s);
    }
    read_key(doc, "n_atoms", cfg.n_atoms);
    read_key(doc, "refinement_sweeps", cfg.refinement_sweeps);
    read_key(doc, "rel_tol", cfg.rel_tol);
    read_key(doc, "subcarriers", cfg.subcarriers);
    read_key(doc, "streams", cfg.streams);
    read_key(doc, "seed", cfg.seed);
    read_key(doc, "budget_mb", cfg.budget_mb);
    read_key(doc, "bench_repetitions", cfg.bench_repetitions);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string experiment_config_json(const ExperimentConfig& cfg)
{
    const SystemConfig& s = cfg.system;
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["preset"] = cfg.preset;
    j["system"] = {{"tx_x", s.tx_x},
                   {"tx_y", s.tx_y},
                   {"rx_x", s.rx_x},
                   {"rx_y", s.rx_y},
                   {"tx_chains", s.tx_chains},
                   {"rx_chains", s.rx_chains},
                   {"training_length", s.training_length},
                   {"taps", s.taps},
                   {"noise_dbm", cfg.noise_dbm},
                   {"sample_period", s.sample_period},
                   {"oversampling", s.oversampling},
                   {"pre_pad", s.pre_pad},
                   {"post_pad", s.post_pad},
                   {"pilot_mode", s.pilot_mode == PilotMode::identical ? "identical" : "per_frame"},
                   {"pulse",
                    {{"kind", s.pulse.kind == PulseKind::sinc ? "sinc" : "raised_cosine"},
                     {"rolloff", s.pulse.rolloff}}}};
    j["scene"] = {{"n_paths", cfg.scene.n_paths},
                  {"on_grid", cfg.scene.on_grid},
                  {"min_separation", cfg.scene.min_separation},
                  {"separated_dims", cfg.scene.separated_dims},
                  {"reflection_loss", cfg.scene.reflection_loss},
                  {"carrier_hz", cfg.scene.carrier_hz},
                  {"user_height", cfg.scene.user_height},
                  {"max_attempts", cfg.scene.max_attempts}};
    j["powers_dbm"] = cfg.powers_dbm;
    j["trials"] = cfg.trials;
    j["noiseless"] = cfg.noiseless;
    j["solver"] = solver_name(cfg.solver);
    j["n_atoms"] = cfg.n_atoms;
    j["refinement_sweeps"] = cfg.refinement_sweeps;
    j["rel_tol"] = cfg.rel_tol;
    j["subcarriers"] = cfg.subcarriers;
    j["streams"] = cfg.streams;
    j["seed"] = cfg.seed;
    j["budget_mb"] = cfg.budget_mb;
    j["bench_repetitions"] = cfg.bench_repetitions;
    return j.dump(2);
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter)
{
    return splitmix64(master + counter * 0x9e3779b97f4a7c15ULL);
}

CampaignReport run_campaign(const ExperimentConfig& cfg)
{
    cfg.validate();
    CampaignReport report;
    if (cfg.trials == 0 || cfg.powers_dbm.empty()) {
        report.warnings.push_back("no trials requested; the report is empty");
        return report;
    }
    const auto solvers = solvers_of(cfg.solver);
    const std::size_t n_jobs = cfg.powers_dbm.size() * cfg.trials;
    std::vector<std::vector<TrialRecord>> slots(n_jobs);
    std::vector<std::exception_ptr> errors(n_jobs);
    // Noise streams are independent of scene streams; scenes repeat across powers.
    const std::uint64_t noise_master = splitmix64(cfg.seed ^ 0x6e6f697365ULL);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < static_cast<std::ptrdiff_t>(n_jobs); ++job) {
        const auto u = static_cast<std::size_t>(job);
        const std::size_t point = u / cfg.trials, trial = u % cfg.trials;
        try {
            const std::uint64_t scene_seed = derive_seed(cfg.seed, trial);
            const std::optional<std::uint64_t> noise_seed =
                cfg.noiseless ? std::nullopt : std::optional<std::uint64_t>(derive_seed(noise_master, u));
            const Instance in = make_instance(cfg, cfg.powers_dbm[point], scene_seed, noise_seed);
            for (SolverChoice which : solvers) {
                double seconds = 0.0;
                const SparseSolution sol = solve(in, which, cfg, false, &seconds);
                TrialRecord r = evaluate(in, sol, cfg);
                r.power_dbm = cfg.powers_dbm[point];
                r.trial = trial;
                r.scene_seed = scene_seed;
                r.solver = solver_name(which);
                r.solve_seconds = seconds;
                slots[u].push_back(std::move(r));
            }
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    for (auto& s : slots)
        for (auto& r : s)
            report.trials.push_back(std::move(r));
    return report;
}

std::string trials_csv_header()
{
    return "power_dbm,trial,scene_seed,solver,angular_error_deg,delay_error_s,nmse_db,se_estimated,se_perfect,"
           "position_valid,position_error_m,peak_aux_bytes";
}

std::string trials_csv(const CampaignReport& report)
{
    std::string out = trials_csv_header() + "\n";
    for (const auto& r : report.trials) {
        out += fmt_double(r.power_dbm) + "," + std::to_string(r.trial) + "," + std::to_string(r.scene_seed) + "," +
               r.solver + "," + fmt_opt(r.angular_error_deg) + "," + fmt_opt(r.delay_error_s) + "," +
               fmt_opt(r.nmse_db) + "," + fmt_double(r.se_estimated) + "," + fmt_double(r.se_perfect) + "," +
               (r.position_valid ? "1" : "0") + "," + fmt_opt(r.position_error_m) + "," +
               std::to_string(r.peak_aux_bytes) + "\n";
    }
    return out;
}

void write_campaign(const CampaignReport& report, const ExperimentConfig& cfg, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir / "trials.csv", std::ios::binary);
        csv << trials_csv(report);
        if (!csv)
            throw std::runtime_error("cannot write " + (out_dir / "trials.csv").string());
    }

    json summary;
    summary["schema_version"] = kConfigSchemaVersion;
    summary["generator"] = {{"name", "smomp-eval"}, {"version", "1.0.0"}};
    summary["config"] = json::parse(experiment_config_json(cfg));
    summary["warnings"] = report.warnings;
    json points = json::array();
    for (double power : cfg.powers_dbm)
        for (SolverChoice which : solvers_of(cfg.solver)) {
            const std::string name = solver_name(which);
            std::vector<double> ang, delay, nmse, se_est, se_perf, pos, secs;
            std::size_t n = 0, valid = 0;
            for (const auto& r : report.trials) {
                if (r.power_dbm != power || r.solver != name)
                    continue;
                ++n;
                if (r.angular_error_deg)
                    ang.push_back(*r.angular_error_deg);
                if (r.delay_error_s)
                    delay.push_back(*r.delay_error_s);
                if (r.nmse_db)
                    nmse.push_back(*r.nmse_db);
                se_est.push_back(r.se_estimated);
                se_perf.push_back(r.se_perfect);
                if (r.position_error_m)
                    pos.push_back(*r.position_error_m);
                valid += r.position_valid ? 1 : 0;
                secs.push_back(r.solve_seconds);
            }
            if (n == 0)
                continue;
            json p;
            p["power_dbm"] = power;
            p["solver"] = name;
            p["trials"] = n;
            p["angular_error_deg"] = stats(ang);
            p["delay_error_s"] = stats(delay);
            p["nmse_db"] = stats(nmse);
            p["se_estimated"] = stats(se_est);
            p["se_perfect"] = stats(se_perf);
            p["position_error_m"] = stats(pos);
            p["position_valid_fraction"] = static_cast<double>(valid) / static_cast<double>(n);
            p["solve_seconds"] = stats(secs);
            points.push_back(std::move(p));
        }
    summary["points"] = std::move(points);
    std::ofstream js(out_dir / "summary.json", std::ios::binary);
    js << summary.dump(2) << "\n";
    if (!js)
        throw std::runtime_error("cannot write " + (out_dir / "summary.json").string());
}

std::vector<BenchRow> benchmark_solvers(const ExperimentConfig& cfg)
{
    ExperimentConfig run = cfg;
    if (run.solver != SolverChoice::smomp)
        run.solver = SolverChoice::smomp; // MOMP refusal is reported per row below
    run.validate();
    const double power = cfg.powers_dbm.empty() ? 20.0 : cfg.powers_dbm.front();
    const Instance in = make_instance(cfg, power, derive_seed(cfg.seed, 0),
                                      cfg.noiseless ? std::nullopt
                                                    : std::optional<std::uint64_t>(derive_seed(cfg.seed, 1)));
    std::size_t rows = 0, cols = 0;
    const std::size_t dense = dense_measurement_bytes(in.system, &rows, &cols);

    std::vector<BenchRow> out;
    for (SolverChoice which : solvers_of(cfg.solver)) {
        BenchRow row;
        row.solver = solver_name(which);
        row.dense_bytes = dense;
        row.formula_rows = rows;
        row.formula_cols = cols;
        if (which == SolverChoice::momp && dense > cfg.budget_bytes()) {
            row.runnable = false;
            out.push_back(row);
            continue;
        }
        std::vector<double> times;
        for (std::size_t rep = 0; rep < cfg.bench_repetitions; ++rep) {
            double seconds = 0.0;
            const SparseSolution sol = solve(in, which, cfg, true, &seconds);
            times.push_back(seconds);
            row.peak_aux_bytes = sol.peak_aux_bytes;
        }
        row.median_seconds = percentile(times, 0.5);
        out.push_back(row);
    }
    return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows)
{
    std::string out = "solver,runnable,median_seconds,peak_aux_bytes,dense_bytes,formula_rows,formula_cols\n";
    for (const auto& r : rows)
        out += r.solver + "," + (r.runnable ? "1" : "0") + "," +
               (r.runnable ? fmt_double(r.median_seconds) : std::string("not runnable")) + "," +
               (r.runnable ? std::to_string(r.peak_aux_bytes) : std::string()) + "," + std::to_string(r.dense_bytes) +
               "," + std::to_string(r.formula_rows) + "," + std::to_string(r.formula_cols) + "\n";
    return out;
}

} // namespace smomp
