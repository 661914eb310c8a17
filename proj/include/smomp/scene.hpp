// SPDX-License-Identifier: Apache-2.0
//
// Synthetic indoor scenes: a wall-mounted receiver array facing a room, a
// transmitter at user height, and single-bounce reflectors. Optionally every
// path parameter is moved onto the estimation grid while keeping the
// line-of-sight geometry exact.

#pragma once

#include "smomp/mmwave.hpp"

#include <array>
#include <random>

namespace smomp {

struct SceneOptions {
    std::size_t n_paths = 1; // line of sight plus n_paths - 1 reflections
    bool on_grid = false;
    // Minimum pairwise separation, in estimation grid cells, that paths must
    // keep in at least `separated_dims` of the five dimensions.
    double min_separation = 0.0;
    std::size_t separated_dims = 5;
    double reflection_loss = 0.5;
    double carrier_hz = 60e9;
    double user_height = 1.3;
    std::size_t max_attempts = 10000;
};

// Per-dimension separation in estimation grid cells: receive x/y and
// transmit x/y in units of 2/(K N) (circular), delay in units of Ts/K.
std::array<double, 5> path_separation(const ChannelPath& a, const ChannelPath& b, const SystemConfig& cfg);

bool well_separated(const ChannelPath& a, const ChannelPath& b, const SystemConfig& cfg, const SceneOptions& opt);

// Grid value nearest to a spatial frequency (circular) or a relative delay.
double snap_frequency(double w, std::size_t n_atoms);
double snap_delay(double relative_delay, const SystemConfig& cfg);

// Rotation matrix with array normal `normal`; the array x axis is horizontal.
Eigen::Matrix3d array_orientation(const Eigen::Vector3d& normal);

// Throws ConfigError when no admissible scene is found within
// opt.max_attempts draws.
ChannelScene generate_scene(const SystemConfig& cfg, const SceneOptions& opt, std::mt19937_64& rng);

} // namespace smomp
