// SPDX-License-Identifier: Apache-2.0

#include "smomp/mmwave.hpp"

#include "smomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace smomp {

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

Eigen::MatrixXcd dft(std::size_t n)
{
    Eigen::MatrixXcd m(idx(n), idx(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            m(idx(a), idx(b)) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((a * b) % n) /
                                                    static_cast<double>(n));
    return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Frequency-domain channel at subcarrier f.
Eigen::MatrixXcd subcarrier(const ChannelTaps& taps, std::size_t f, std::size_t n)
{
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(taps[0].rows(), taps[0].cols());
    for (std::size_t d = 0; d < taps.size(); ++d)
        h += std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((f * d) % n) / static_cast<double>(n)) *
             taps[d];
    return h;
}

// Power fractions (summing to 1) maximizing sum log2(1 + p_s g_s).
std::vector<double> water_fill(const std::vector<double>& gains)
{
    std::vector<double> p(gains.size(), 0.0);
    std::size_t active = 0;
    while (active < gains.size() && gains[active] > 0.0)
        ++active;
    for (std::size_t k = active; k > 0; --k) {
        double inv = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            inv += 1.0 / gains[i];
        const double level = (1.0 + inv) / static_cast<double>(k);
        if (level - 1.0 / gains[k - 1] > 0.0) {
            for (std::size_t i = 0; i < k; ++i)
                p[i] = level - 1.0 / gains[i];
            break;
        }
    }
    return p;
}

} // namespace

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

void SystemConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError("system config: " + msg); };
    if (tx_x == 0 || tx_y == 0 || rx_x == 0 || rx_y == 0)
        fail("antenna counts must be positive");
    if (tx_chains == 0 || tx_antennas() % tx_chains != 0)
        fail("transmit RF chains (" + std::to_string(tx_chains) + ") must divide the " +
             std::to_string(tx_antennas()) + " transmit antennas");
    if (rx_chains == 0 || rx_antennas() % rx_chains != 0)
        fail("receive RF chains (" + std::to_string(rx_chains) + ") must divide the " +
             std::to_string(rx_antennas()) + " receive antennas");
    if (taps == 0 || training_length == 0)
        fail("taps and training length must be positive");
    if (!(power_mw > 0.0) || !(noise_mw > 0.0))
        fail("transmit and noise power must be positive");
    if (!(sample_period > 0.0) || pulse.sample_period != sample_period)
        fail("pulse sample period must equal the system sample period");
    if (oversampling == 0)
        fail("oversampling must be positive");
    if (pre_pad + 1 < taps)
        fail("pre-padding " + std::to_string(pre_pad) + " is shorter than taps - 1");
    if (!is_power_of_two(training_length) || training_length < tx_chains)
        fail("training length must be a power of two no smaller than the transmit RF chains");
}

void ChannelScene::validate() const
{
    for (const auto& p : paths) {
        if (std::abs(p.arrival.norm() - 1.0) > 1e-12 || std::abs(p.departure.norm() - 1.0) > 1e-12)
            throw ConfigError("channel scene: path directions must be unit vectors");
        if (p.delay < 0.0)
            throw ConfigError("channel scene: negative path delay");
    }
    if (line_of_sight) {
        if (paths.empty())
            throw ConfigError("channel scene: line of sight flagged without paths");
        const Eigen::Vector3d d = tx_position - rx_position;
        if (std::abs(paths[0].delay - d.norm() / kSpeedOfLight) > 1e-9)
            throw ConfigError("channel scene: line-of-sight delay disagrees with the geometry");
        if ((rx_orientation * paths[0].arrival - d.normalized()).norm() > 1e-9)
            throw ConfigError("channel scene: line-of-sight arrival disagrees with the geometry");
    }
}

Eigen::VectorXcd array_response(std::size_t n_x, std::size_t n_y, double wx, double wy)
{
    const Eigen::VectorXcd ax = axis_steering(n_x, wx);
    const Eigen::VectorXcd ay = axis_steering(n_y, wy);
    Eigen::VectorXcd a(ax.size() * ay.size());
    for (Eigen::Index i = 0; i < ax.size(); ++i)
        a.segment(i * ay.size(), ay.size()) = ax(i) * ay;
    return a;
}

ChannelTaps gen_channel_taps(const ChannelScene& scene, const SystemConfig& cfg)
{
    ChannelTaps taps(cfg.taps, Eigen::MatrixXcd::Zero(idx(cfg.rx_antennas()), idx(cfg.tx_antennas())));
    for (const auto& path : scene.paths) {
        const Eigen::MatrixXcd outer = array_response(cfg.rx_x, cfg.rx_y, path.arrival) *
                                       array_response(cfg.tx_x, cfg.tx_y, path.departure).adjoint();
        for (std::size_t d = 0; d < cfg.taps; ++d) {
            const double t = static_cast<double>(d) * cfg.sample_period + scene.clock_offset - path.delay;
            taps[d] += path.gain * evaluate_pulse(cfg.pulse, t) * outer;
        }
    }
    return taps;
}

Codebooks gen_codebooks(const SystemConfig& cfg)
{
    cfg.validate();
    auto blocks = [](std::size_t nx, std::size_t ny, std::size_t chains) {
        const std::size_t n = nx * ny;
        const Eigen::MatrixXcd full = kron(dft(nx), dft(ny)) / std::sqrt(static_cast<double>(n));
        std::vector<Eigen::MatrixXcd> out;
        for (std::size_t b = 0; b < n / chains; ++b)
            out.push_back(full.middleCols(idx(b * chains), idx(chains)));
        return out;
    };
    return {blocks(cfg.rx_x, cfg.rx_y, cfg.rx_chains), blocks(cfg.tx_x, cfg.tx_y, cfg.tx_chains)};
}

Eigen::MatrixXd hadamard(std::size_t n)
{
    if (!is_power_of_two(n))
        throw ConfigError("hadamard: order " + std::to_string(n) + " is not a power of two");
    Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
    while (static_cast<std::size_t>(h.rows()) < n) {
        const Eigen::Index k = h.rows();
        Eigen::MatrixXd next(2 * k, 2 * k);
        next << h, h, h, -h;
        h = std::move(next);
    }
    return h;
}

std::vector<Eigen::MatrixXcd> gen_pilots(const SystemConfig& cfg)
{
    cfg.validate();
    const std::size_t q = cfg.training_length;
    const Eigen::MatrixXd h = hadamard(q);
    std::vector<Eigen::MatrixXcd> pilots;
    for (std::size_t m2 = 0; m2 < cfg.tx_frames(); ++m2) {
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(idx(cfg.tx_chains), idx(cfg.pre_pad + q + cfg.post_pad));
        for (std::size_t r = 0; r < cfg.tx_chains; ++r) {
            const std::size_t row = cfg.pilot_mode == PilotMode::identical ? r : (m2 * cfg.tx_chains + r) % q;
            s.row(idx(r)).segment(idx(cfg.pre_pad), idx(q)) = h.row(idx(row)).cast<cplx>();
        }
        pilots.push_back(std::move(s));
    }
    return pilots;
}

std::vector<SoundingFrame> make_frames(const SystemConfig& cfg)
{
    const auto books = gen_codebooks(cfg);
    const auto pilots = gen_pilots(cfg);
    std::vector<SoundingFrame> frames;
    for (std::size_t m1 = 0; m1 < cfg.rx_frames(); ++m1)
        for (std::size_t m2 = 0; m2 < cfg.tx_frames(); ++m2)
            frames.push_back({m1, m2, books.combiners[m1], books.precoders[m2], pilots[m2], {}});
    return frames;
}

std::vector<Eigen::MatrixXcd> sound_channel(const ChannelTaps& taps, const std::vector<SoundingFrame>& frames,
                                            const SystemConfig& cfg, std::optional<std::uint64_t> noise_seed)
{
    if (taps.size() != cfg.taps)
        throw ShapeError("sound_channel: expected " + std::to_string(cfg.taps) + " taps");
    const double amplitude = std::sqrt(cfg.power_mw);
    const std::size_t q_len = cfg.training_length;
    std::mt19937_64 rng(noise_seed.value_or(0));
    std::normal_distribution<double> normal(0.0, std::sqrt(cfg.noise_mw / 2.0));

    std::vector<Eigen::MatrixXcd> out;
    out.reserve(frames.size());
    for (const auto& fr : frames) {
        if (fr.pilot.cols() < idx(cfg.pre_pad + q_len) || fr.combiner.rows() != taps[0].rows() ||
            fr.precoder.rows() != taps[0].cols())
            throw ShapeError("sound_channel: frame shapes do not match the channel");
        Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(fr.combiner.cols(), idx(q_len));
        for (std::size_t d = 0; d < cfg.taps; ++d) {
            const Eigen::MatrixXcd g = fr.combiner.adjoint() * taps[d] * fr.precoder;
            // Column q reads pilot column q + pre - d.
            y += g * fr.pilot.middleCols(idx(cfg.pre_pad - d), idx(q_len));
        }
        y *= amplitude;
        if (noise_seed) {
            Eigen::MatrixXcd n(fr.combiner.rows(), idx(q_len));
            for (Eigen::Index c = 0; c < n.cols(); ++c)
                for (Eigen::Index r = 0; r < n.rows(); ++r)
                    n(r, c) = cplx(normal(rng), normal(rng));
            y += fr.combiner.adjoint() * n;
        }
        out.push_back(std::move(y));
    }
    return out;
}

std::vector<Eigen::MatrixXcd> whiten_frames(std::vector<SoundingFrame>& frames,
                                            const std::vector<Eigen::MatrixXcd>& observations)
{
    if (frames.size() != observations.size())
        throw ShapeError("whiten_frames: one observation per frame required");
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(frames.size());
    for (std::size_t m = 0; m < frames.size(); ++m) {
        const Eigen::MatrixXcd gram = frames[m].combiner.adjoint() * frames[m].combiner;
        Eigen::LLT<Eigen::MatrixXcd> llt(gram);
        if (llt.info() != Eigen::Success)
            throw ConfigError("whiten_frames: combiner columns of frame " + std::to_string(m) + " are dependent");
        frames[m].whitener = llt.matrixL();
        out.push_back(llt.matrixL().solve(observations[m]));
    }
    return out;
}

std::vector<Dictionary> estimation_dictionaries(const SystemConfig& cfg)
{
    const std::size_t k = cfg.oversampling;
    return {build_axis_dictionary(cfg.rx_x, k * cfg.rx_x), build_axis_dictionary(cfg.rx_y, k * cfg.rx_y),
            conjugate(build_axis_dictionary(cfg.tx_x, k * cfg.tx_x)),
            conjugate(build_axis_dictionary(cfg.tx_y, k * cfg.tx_y)),
            build_delay_dictionary(cfg.taps, k * cfg.taps, cfg.pulse, cfg.delay_span())};
}

SeparableProblem assemble_problem(const std::vector<Eigen::MatrixXcd>& whitened,
                                  const std::vector<SoundingFrame>& frames, const SystemConfig& cfg)
{
    cfg.validate();
    const std::size_t m1s = cfg.rx_frames(), m2s = cfg.tx_frames();
    const std::size_t mr = cfg.rx_chains, q_len = cfg.training_length;
    if (frames.size() != m1s * m2s || whitened.size() != frames.size())
        throw ShapeError("assemble_problem: expected " + std::to_string(m1s * m2s) + " frames");
    for (std::size_t m = 0; m < frames.size(); ++m) {
        const auto& fr = frames[m];
        if (fr.rx_frame * m2s + fr.tx_frame != m)
            throw ShapeError("assemble_problem: frames out of order");
        if (fr.whitener.rows() != idx(mr) || fr.whitener.cols() != idx(mr))
            throw ShapeError("assemble_problem: frame " + std::to_string(m) + " is not whitened");
        if (whitened[m].rows() != idx(mr) || whitened[m].cols() != idx(q_len))
            throw ShapeError("assemble_problem: observation " + std::to_string(m) + " has the wrong shape");
        if (fr.combiner.rows() != idx(cfg.rx_antennas()) || fr.precoder.rows() != idx(cfg.tx_antennas()))
            throw ShapeError("assemble_problem: frame " + std::to_string(m) + " does not match the arrays");
    }
    const auto dicts = estimation_dictionaries(cfg);
    SeparableProblem p;

    FactorBlock rx;
    rx.measurement = ComplexTensor(IndexSpace{m1s * mr, cfg.rx_x, cfg.rx_y});
    const double amplitude = std::sqrt(cfg.power_mw);
    for (std::size_t m1 = 0; m1 < m1s; ++m1) {
        const auto& fr = frames[m1 * m2s];
        const Eigen::MatrixXcd a = amplitude * fr.whitener.triangularView<Eigen::Lower>().solve(fr.combiner.adjoint());
        for (std::size_t r = 0; r < mr; ++r)
            for (std::size_t ix = 0; ix < cfg.rx_x; ++ix)
                for (std::size_t iy = 0; iy < cfg.rx_y; ++iy)
                    rx.measurement.at({m1 * mr + r, ix, iy}) = a(idx(r), idx(ix * cfg.rx_y + iy));
    }
    rx.dictionaries = {dicts[0], dicts[1]};

    FactorBlock tx;
    tx.measurement = ComplexTensor(IndexSpace{m2s * q_len, cfg.tx_x, cfg.tx_y, cfg.taps});
    for (std::size_t m2 = 0; m2 < m2s; ++m2) {
        const auto& fr = frames[m2];
        const Eigen::MatrixXcd fs = fr.precoder * fr.pilot;
        for (std::size_t q = 0; q < q_len; ++q)
            for (std::size_t ix = 0; ix < cfg.tx_x; ++ix)
                for (std::size_t iy = 0; iy < cfg.tx_y; ++iy)
                    for (std::size_t d = 0; d < cfg.taps; ++d)
                        tx.measurement.at({m2 * q_len + q, ix, iy, d}) =
                            fs(idx(ix * cfg.tx_y + iy), idx(q + cfg.pre_pad - d));
    }
    tx.dictionaries = {dicts[2], dicts[3], dicts[4]};

    p.observation = ComplexTensor(IndexSpace{m1s * mr, m2s * q_len, 1});
    for (std::size_t m1 = 0; m1 < m1s; ++m1)
        for (std::size_t m2 = 0; m2 < m2s; ++m2)
            for (std::size_t r = 0; r < mr; ++r)
                for (std::size_t q = 0; q < q_len; ++q)
                    p.observation.at({m1 * mr + r, m2 * q_len + q, 0}) = whitened[m1 * m2s + m2](idx(r), idx(q));
    p.factors = {std::move(rx), std::move(tx)};
    return p;
}

std::optional<Eigen::Vector3d> direction_from_frequencies(double wx, double wy)
{
    const double r2 = wx * wx + wy * wy;
    if (r2 > 1.0)
        return std::nullopt;
    return Eigen::Vector3d(wx, wy, std::sqrt(1.0 - r2));
}

std::optional<Eigen::Vector3d> EstimatedPath::arrival() const { return direction_from_frequencies(rx_wx, rx_wy); }
std::optional<Eigen::Vector3d> EstimatedPath::departure() const { return direction_from_frequencies(tx_wx, tx_wy); }

std::vector<EstimatedPath> extract_paths(const SparseSolution& sol, const SystemConfig& cfg)
{
    const std::size_t k = cfg.oversampling;
    const std::size_t delay_atoms = k * cfg.taps;
    std::vector<EstimatedPath> out;
    for (std::size_t s = 0; s < sol.support.size(); ++s) {
        const auto& j = sol.support[s];
        if (j.size() != 5)
            throw ShapeError("extract_paths: expected five-dimensional atom indices");
        EstimatedPath p;
        p.gain = sol.coefficients(idx(s), 0);
        p.rx_wx = axis_grid_frequency(j[0], k * cfg.rx_x);
        p.rx_wy = axis_grid_frequency(j[1], k * cfg.rx_y);
        p.tx_wx = axis_grid_frequency(j[2], k * cfg.tx_x);
        p.tx_wy = axis_grid_frequency(j[3], k * cfg.tx_y);
        p.delay = static_cast<double>(j[4]) * cfg.delay_span() / static_cast<double>(delay_atoms);
        out.push_back(p);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const EstimatedPath& a, const EstimatedPath& b) { return std::abs(a.gain) > std::abs(b.gain); });
    return out;
}

ChannelTaps estimated_taps(const std::vector<EstimatedPath>& paths, const SystemConfig& cfg)
{
    ChannelTaps taps(cfg.taps, Eigen::MatrixXcd::Zero(idx(cfg.rx_antennas()), idx(cfg.tx_antennas())));
    for (const auto& p : paths) {
        const Eigen::MatrixXcd outer = array_response(cfg.rx_x, cfg.rx_y, p.rx_wx, p.rx_wy) *
                                       array_response(cfg.tx_x, cfg.tx_y, p.tx_wx, p.tx_wy).adjoint();
        for (std::size_t d = 0; d < cfg.taps; ++d)
            taps[d] += p.gain * evaluate_pulse(cfg.pulse, static_cast<double>(d) * cfg.sample_period - p.delay) * outer;
    }
    return taps;
}

PositionEstimate estimate_position(const EstimatedPath& path, const Eigen::Vector3d& rx_position,
                                   const Eigen::Matrix3d& rx_orientation, double clock_offset)
{
    const auto dir = path.arrival();
    if (!dir)
        return {};
    const double range = kSpeedOfLight * (clock_offset + path.delay);
    return {true, rx_position + range * (rx_orientation * *dir)};
}

double spectral_efficiency(const ChannelTaps& channel, const ChannelTaps& design, const SystemConfig& cfg,
                           std::size_t n_subcarriers, std::size_t streams)
{
    if (n_subcarriers < cfg.taps)
        throw ConfigError("spectral_efficiency: fewer subcarriers than taps");
    if (channel.size() != cfg.taps || design.size() != cfg.taps)
        throw ShapeError("spectral_efficiency: tap count mismatch");
    const double snr = cfg.power_mw / cfg.noise_mw;
    double total = 0.0;
    for (std::size_t f = 0; f < n_subcarriers; ++f) {
        const Eigen::MatrixXcd h = subcarrier(channel, f, n_subcarriers);
        const Eigen::MatrixXcd g = subcarrier(design, f, n_subcarriers);
        const Eigen::BDCSVD<Eigen::MatrixXcd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const std::size_t ns = std::min<std::size_t>(streams, static_cast<std::size_t>(sv.size()));
        std::vector<double> gains(ns);
        for (std::size_t s = 0; s < ns; ++s)
            gains[s] = snr * sv(idx(s)) * sv(idx(s));
        const auto power = water_fill(gains);
        std::size_t used = 0;
        while (used < ns && power[used] > 0.0)
            ++used;
        if (used == 0)
            continue;
        const Eigen::MatrixXcd w = svd.matrixU().leftCols(idx(used));
        Eigen::MatrixXcd f_mat = svd.matrixV().leftCols(idx(used));
        for (std::size_t s = 0; s < used; ++s)
            f_mat.col(idx(s)) *= std::sqrt(power[s]);
        const Eigen::MatrixXcd eff = w.adjoint() * h * f_mat;
        const Eigen::MatrixXcd cov = Eigen::MatrixXcd::Identity(idx(used), idx(used)) + snr * eff * eff.adjoint();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov, Eigen::EigenvaluesOnly);
        for (Eigen::Index s = 0; s < eig.eigenvalues().size(); ++s)
            total += std::log2(std::max(eig.eigenvalues()(s), 1.0));
    }
    return total / static_cast<double>(n_subcarriers);
}

} // namespace smomp
