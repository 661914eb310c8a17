// SPDX-License-Identifier: Apache-2.0

#include "smomp/metrics.hpp"

#include "smomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace smomp {

double angular_error(const Eigen::Vector3d& truth, const Eigen::Vector3d& estimate, bool* renormalized)
{
    const double nt = truth.norm(), ne = estimate.norm();
    if (nt == 0.0 || ne == 0.0)
        throw ConfigError("angular_error: zero direction");
    if (renormalized)
        *renormalized = std::abs(nt - 1.0) > 1e-12 || std::abs(ne - 1.0) > 1e-12;
    const Eigen::Vector3d a = truth / nt, b = estimate / ne;
    // atan2 keeps full precision for tiny angles where acos does not.
    return std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / std::numbers::pi;
}

std::optional<double> channel_nmse(const ChannelTaps& truth, const ChannelTaps& estimate)
{
    if (truth.size() != estimate.size())
        throw ShapeError("channel_nmse: tap count mismatch");
    double err = 0.0, ref = 0.0;
    for (std::size_t d = 0; d < truth.size(); ++d) {
        if (truth[d].rows() != estimate[d].rows() || truth[d].cols() != estimate[d].cols())
            throw ShapeError("channel_nmse: tap shape mismatch");
        err += (truth[d] - estimate[d]).squaredNorm();
        ref += truth[d].squaredNorm();
    }
    if (ref == 0.0)
        return std::nullopt;
    if (err == 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(err / ref);
}

} // namespace smomp
