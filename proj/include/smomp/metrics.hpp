// SPDX-License-Identifier: Apache-2.0
//
// Estimation quality metrics.

#pragma once

#include "smomp/mmwave.hpp"

#include <optional>

namespace smomp {

// Angle between two directions in degrees, in [0, 180]. Inputs that are not
// unit length are normalized first and `renormalized` (if given) is set.
// Throws ConfigError on a zero vector.
double angular_error(const Eigen::Vector3d& truth, const Eigen::Vector3d& estimate, bool* renormalized = nullptr);

// 10 log10(sum_d |H_d - E_d|^2 / sum_d |H_d|^2). A perfect estimate gives
// -infinity; a zero true channel gives no value.
std::optional<double> channel_nmse(const ChannelTaps& truth, const ChannelTaps& estimate);

} // namespace smomp
