// SPDX-License-Identifier: Apache-2.0
//
// Per-dimension sparsifying dictionaries: half-wavelength axis steering
// vectors over a spatial-frequency grid, and sampled pulse responses over a
// delay grid.

#pragma once

#include "smomp/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace smomp {

// Atoms are the columns of `entries`; atom_params[j] is the physical
// parameter (spatial frequency or delay in seconds) that generated column j.
struct Dictionary {
    Eigen::MatrixXcd entries;
    std::vector<double> atom_params;

    std::size_t signal_size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
    std::size_t atom_count() const noexcept { return static_cast<std::size_t>(entries.cols()); }

    // Throws ConfigError if a column is zero, the parameter list does not
    // match the columns, or the parameters are not strictly increasing.
    void validate() const;
};

enum class PulseKind { sinc, raised_cosine };

struct PulseShape {
    PulseKind kind = PulseKind::sinc;
    double rolloff = 0.0;
    double sample_period = 1e-9;
};

double evaluate_pulse(const PulseShape& pulse, double t);

// Column j is exp(i*pi*n*w_j), n = 0..n_antennas-1, with w_j = -1 + 2j/n_atoms.
Dictionary build_axis_dictionary(std::size_t n_antennas, std::size_t n_atoms);

// Column j holds p(d*Ts - tau_j), d = 0..n_taps-1, with tau_j = j*tau_max/n_atoms.
Dictionary build_delay_dictionary(std::size_t n_taps, std::size_t n_atoms, const PulseShape& pulse, double tau_max);

// Element-wise conjugate of a dictionary (same parameters).
Dictionary conjugate(const Dictionary& dict);

// Grid position of the atom whose parameter is nearest to `param`.
std::size_t nearest_atom(const Dictionary& dict, double param);

// Spatial frequency of grid point j for an axis dictionary with n_atoms atoms.
inline double axis_grid_frequency(std::size_t j, std::size_t n_atoms)
{
    return -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n_atoms);
}

// Steering vector exp(i*pi*n*w) of a half-wavelength uniform linear array.
Eigen::VectorXcd axis_steering(std::size_t n_antennas, double spatial_frequency);

} // namespace smomp
