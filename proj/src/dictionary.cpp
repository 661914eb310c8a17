// SPDX-License-Identifier: Apache-2.0

#include "smomp/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace smomp {

namespace {

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

} // namespace

void Dictionary::validate() const
{
    if (atom_params.size() != atom_count())
        throw ConfigError("dictionary: " + std::to_string(atom_params.size()) + " parameters for " +
                          std::to_string(atom_count()) + " atoms");
    for (Eigen::Index j = 0; j < entries.cols(); ++j)
        if (entries.col(j).squaredNorm() == 0.0)
            throw ConfigError("dictionary: atom " + std::to_string(j) + " is zero");
    for (std::size_t j = 1; j < atom_params.size(); ++j)
        if (!(atom_params[j] > atom_params[j - 1]))
            throw ConfigError("dictionary: atom parameters not strictly increasing");
}

double evaluate_pulse(const PulseShape& pulse, double t)
{
    const double x = t / pulse.sample_period;
    if (pulse.kind == PulseKind::sinc || pulse.rolloff == 0.0)
        return sinc(x);

    // Raised cosine: sinc(x) cos(pi b x) / (1 - (2 b x)^2), with the
    // removable singularity at |x| = 1/(2b) replaced by its limit.
    const double b = pulse.rolloff;
    const double edge = 2.0 * b * x;
    const double denom = 1.0 - edge * edge;
    if (std::abs(denom) < 1e-10)
        return std::numbers::pi / 4.0 * sinc(1.0 / (2.0 * b));
    return sinc(x) * std::cos(std::numbers::pi * b * x) / denom;
}

Eigen::VectorXcd axis_steering(std::size_t n_antennas, double spatial_frequency)
{
    Eigen::VectorXcd a(static_cast<Eigen::Index>(n_antennas));
    for (std::size_t n = 0; n < n_antennas; ++n)
        a(static_cast<Eigen::Index>(n)) =
            std::polar(1.0, std::numbers::pi * static_cast<double>(n) * spatial_frequency);
    return a;
}

Dictionary build_axis_dictionary(std::size_t n_antennas, std::size_t n_atoms)
{
    if (n_antennas == 0)
        throw ConfigError("axis dictionary: zero antennas");
    if (n_atoms < n_antennas)
        throw ConfigError("axis dictionary: " + std::to_string(n_atoms) + " atoms for " + std::to_string(n_antennas) +
                          " antennas is undercomplete");
    Dictionary dict;
    dict.entries.resize(static_cast<Eigen::Index>(n_antennas), static_cast<Eigen::Index>(n_atoms));
    dict.atom_params.resize(n_atoms);
    for (std::size_t j = 0; j < n_atoms; ++j) {
        const double w = axis_grid_frequency(j, n_atoms);
        dict.atom_params[j] = w;
        dict.entries.col(static_cast<Eigen::Index>(j)) = axis_steering(n_antennas, w);
    }
    return dict;
}

Dictionary build_delay_dictionary(std::size_t n_taps, std::size_t n_atoms, const PulseShape& pulse, double tau_max)
{
    if (n_atoms == 0)
        throw ConfigError("delay dictionary: atom count must be positive");
    if (n_taps == 0)
        throw ConfigError("delay dictionary: tap count must be positive");
    if (!(pulse.sample_period > 0.0))
        throw ConfigError("delay dictionary: sample period must be positive");
    if (tau_max < 0.0 || tau_max > static_cast<double>(n_taps) * pulse.sample_period * (1.0 + 1e-12))
        throw ConfigError("delay dictionary: tau_max outside [0, n_taps * Ts]");

    Dictionary dict;
    dict.entries.resize(static_cast<Eigen::Index>(n_taps), static_cast<Eigen::Index>(n_atoms));
    dict.atom_params.resize(n_atoms);
    for (std::size_t j = 0; j < n_atoms; ++j) {
        const double tau = tau_max * static_cast<double>(j) / static_cast<double>(n_atoms);
        dict.atom_params[j] = tau;
        for (std::size_t d = 0; d < n_taps; ++d)
            dict.entries(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)) =
                evaluate_pulse(pulse, static_cast<double>(d) * pulse.sample_period - tau);
    }
    return dict;
}

Dictionary conjugate(const Dictionary& dict)
{
    Dictionary out;
    out.entries = dict.entries.conjugate();
    out.atom_params = dict.atom_params;
    return out;
}

std::size_t nearest_atom(const Dictionary& dict, double param)
{
    const auto& p = dict.atom_params;
    if (p.empty())
        throw RangeError("nearest_atom: empty dictionary");
    auto it = std::lower_bound(p.begin(), p.end(), param);
    if (it == p.end())
        return p.size() - 1;
    if (it == p.begin())
        return 0;
    const auto hi = static_cast<std::size_t>(it - p.begin());
    return (param - p[hi - 1] <= p[hi] - param) ? hi - 1 : hi;
}

} // namespace smomp
