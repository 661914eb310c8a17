// SPDX-License-Identifier: Apache-2.0

#include "smomp/scene.hpp"

#include "smomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace smomp {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double circular_cells(double a, double b, std::size_t n)
{
    double d = std::fmod(std::abs(a - b), 2.0);
    d = std::min(d, 2.0 - d);
    return d * static_cast<double>(n) / 2.0;
}

// Rotation taking unit vector a onto unit vector b.
Eigen::Matrix3d rotation_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    return Eigen::Quaterniond::FromTwoVectors(a, b).toRotationMatrix();
}

std::optional<Eigen::Vector3d> snapped_direction(const Eigen::Vector3d& u, std::size_t nx, std::size_t ny,
                                                 std::size_t oversampling)
{
    return direction_from_frequencies(snap_frequency(u.x(), oversampling * nx), snap_frequency(u.y(), oversampling * ny));
}

struct Geometry {
    Eigen::Vector3d rx, tx;
    Eigen::Matrix3d rx_rot, tx_rot;
};

Geometry draw_geometry(const SceneOptions& opt, std::mt19937_64& rng)
{
    Geometry g;
    g.rx = {0.0, 0.0, 3.0};
    const double tilt = 20.0 * kDeg;
    g.rx_rot = array_orientation({std::cos(tilt), 0.0, -std::sin(tilt)});
    g.tx = {uniform(rng, 2.0, 8.0), uniform(rng, -3.0, 3.0), opt.user_height};
    const Eigen::Vector3d to_rx = g.rx - g.tx;
    const double yaw = std::atan2(to_rx.y(), to_rx.x()) + uniform(rng, -30.0, 30.0) * kDeg;
    const double pitch = uniform(rng, 0.0, 20.0) * kDeg;
    g.tx_rot = array_orientation(
        {std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch)});
    return g;
}

} // namespace

std::array<double, 5> path_separation(const ChannelPath& a, const ChannelPath& b, const SystemConfig& cfg)
{
    const std::size_t k = cfg.oversampling;
    return {circular_cells(a.arrival.x(), b.arrival.x(), k * cfg.rx_x),
            circular_cells(a.arrival.y(), b.arrival.y(), k * cfg.rx_y),
            circular_cells(a.departure.x(), b.departure.x(), k * cfg.tx_x),
            circular_cells(a.departure.y(), b.departure.y(), k * cfg.tx_y),
            std::abs(a.delay - b.delay) * static_cast<double>(k) / cfg.sample_period};
}

bool well_separated(const ChannelPath& a, const ChannelPath& b, const SystemConfig& cfg, const SceneOptions& opt)
{
    const auto sep = path_separation(a, b, cfg);
    const auto count = std::count_if(sep.begin(), sep.end(), [&](double s) { return s >= opt.min_separation - 1e-9; });
    return static_cast<std::size_t>(count) >= opt.separated_dims;
}

double snap_frequency(double w, std::size_t n_atoms)
{
    const auto n = static_cast<long long>(n_atoms);
    long long j = std::llround((w + 1.0) * static_cast<double>(n_atoms) / 2.0) % n;
    if (j < 0)
        j += n;
    return axis_grid_frequency(static_cast<std::size_t>(j), n_atoms);
}

double snap_delay(double relative_delay, const SystemConfig& cfg)
{
    const std::size_t n_atoms = cfg.oversampling * cfg.taps;
    const double step = cfg.delay_span() / static_cast<double>(n_atoms);
    const auto j = std::llround(relative_delay / step);
    return static_cast<double>(std::clamp<long long>(j, 0, static_cast<long long>(n_atoms) - 1)) * cfg.delay_span() /
           static_cast<double>(n_atoms);
}

Eigen::Matrix3d array_orientation(const Eigen::Vector3d& normal)
{
    const Eigen::Vector3d ez = normal.normalized();
    const Eigen::Vector3d ex = Eigen::Vector3d::UnitZ().cross(ez).normalized();
    Eigen::Matrix3d r;
    r.col(0) = ex;
    r.col(1) = ez.cross(ex);
    r.col(2) = ez;
    return r;
}

ChannelScene generate_scene(const SystemConfig& cfg, const SceneOptions& opt, std::mt19937_64& rng)
{
    cfg.validate();
    if (opt.n_paths == 0)
        throw ConfigError("scene: at least the line-of-sight path is required");
    const double wavelength = kSpeedOfLight / opt.carrier_hz;
    const double window = static_cast<double>(cfg.taps - 1) * cfg.sample_period;
    auto phase = [&] { return std::polar(1.0, uniform(rng, -std::numbers::pi, std::numbers::pi)); };

    for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
        Geometry g = draw_geometry(opt, rng);
        const Eigen::Vector3d los = g.tx - g.rx;
        const double range = los.norm();
        ChannelPath direct;
        direct.delay = range / kSpeedOfLight;
        direct.arrival = g.rx_rot.transpose() * los / range;
        direct.departure = g.tx_rot.transpose() * (-los / range);
        if (direct.arrival.z() <= 0.0 || direct.departure.z() <= 0.0)
            continue;

        if (opt.on_grid) {
            // Snap the arrival, move the transmitter along it at the same
            // range, then turn the transmitter so the departure lands on the grid.
            const auto arr = snapped_direction(direct.arrival, cfg.rx_x, cfg.rx_y, cfg.oversampling);
            if (!arr)
                continue;
            const Eigen::Vector3d world_dir = g.rx_rot * *arr;
            g.tx = g.rx + range * world_dir;
            const auto dep = snapped_direction(g.tx_rot.transpose() * -world_dir, cfg.tx_x, cfg.tx_y, cfg.oversampling);
            if (!dep)
                continue;
            g.tx_rot = rotation_between(g.tx_rot * *dep, -world_dir) * g.tx_rot;
            direct.arrival = *arr;
            direct.departure = g.tx_rot.transpose() * -world_dir;
        }
        direct.gain = wavelength / (4.0 * std::numbers::pi * range) * phase();

        ChannelScene scene;
        scene.rx_position = g.rx;
        scene.tx_position = g.tx;
        scene.rx_orientation = g.rx_rot;
        scene.tx_orientation = g.tx_rot;
        scene.clock_offset = direct.delay;
        scene.line_of_sight = true;
        scene.paths.push_back(direct);

        std::size_t tries = 0;
        while (scene.paths.size() < opt.n_paths && tries++ < opt.max_attempts) {
            const Eigen::Vector3d s{uniform(rng, -1.0, 10.0), uniform(rng, -5.0, 5.0), uniform(rng, 0.0, 3.5)};
            const Eigen::Vector3d to_s_rx = s - g.rx, to_s_tx = s - g.tx;
            const double length = to_s_rx.norm() + to_s_tx.norm();
            ChannelPath p;
            p.arrival = g.rx_rot.transpose() * to_s_rx.normalized();
            p.departure = g.tx_rot.transpose() * to_s_tx.normalized();
            double excess = length / kSpeedOfLight - direct.delay;
            if (p.arrival.z() <= 0.0 || p.departure.z() <= 0.0 || !(excess > 0.0) || excess >= window)
                continue;
            if (opt.on_grid) {
                const auto arr = snapped_direction(p.arrival, cfg.rx_x, cfg.rx_y, cfg.oversampling);
                const auto dep = snapped_direction(p.departure, cfg.tx_x, cfg.tx_y, cfg.oversampling);
                if (!arr || !dep)
                    continue;
                p.arrival = *arr;
                p.departure = *dep;
                excess = snap_delay(excess, cfg);
            }
            p.delay = direct.delay + excess;
            p.gain = opt.reflection_loss * wavelength / (4.0 * std::numbers::pi * length) * phase();
            const bool ok = std::all_of(scene.paths.begin(), scene.paths.end(),
                                        [&](const ChannelPath& q) { return well_separated(p, q, cfg, opt); });
            if (ok)
                scene.paths.push_back(p);
        }
        if (scene.paths.size() == opt.n_paths) {
            scene.validate();
            return scene;
        }
    }
    throw ConfigError("scene: no admissible scene found; relax the separation or path count");
}

} // namespace smomp
