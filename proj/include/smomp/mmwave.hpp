// SPDX-License-Identifier: Apache-2.0
//
// Frequency-selective mmWave MIMO channel estimation with hybrid
// transceivers: geometric channel taps, DFT codebooks, Hadamard pilots,
// sounding, whitening, and assembly of the separable estimation problem.
//
// Array conventions: uniform rectangular arrays in the local x-y plane with
// half-wavelength spacing, antenna n = n_x * N^y + n_y. A direction is a unit
// vector in the array frame; its spatial frequencies are its x and y
// components. Taps and delay-dictionary rows are 0-based.

#pragma once

#include "smomp/dictionary.hpp"
#include "smomp/problem.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace smomp {

inline constexpr double kSpeedOfLight = 299'792'458.0;

double dbm_to_mw(double dbm);

enum class PilotMode {
    identical, // every transmit frame uses Hadamard rows 0..M_T-1
    per_frame  // transmit frame m2 uses rows (m2*M_T + r) mod Q
};

struct SystemConfig {
    std::size_t tx_x = 2, tx_y = 2; // transmit antennas per axis
    std::size_t rx_x = 4, rx_y = 4; // receive antennas per axis
    std::size_t tx_chains = 2;      // M_T
    std::size_t rx_chains = 4;      // M_R
    std::size_t training_length = 8; // Q
    std::size_t taps = 8;            // D
    double power_mw = 1.0;
    double noise_mw = 1e-9;
    double sample_period = 1e-9;
    std::size_t oversampling = 16; // atoms per signal element in every dictionary
    PulseShape pulse{};
    std::size_t pre_pad = 8;
    std::size_t post_pad = 8;
    PilotMode pilot_mode = PilotMode::identical;

    std::size_t tx_antennas() const { return tx_x * tx_y; }
    std::size_t rx_antennas() const { return rx_x * rx_y; }
    std::size_t rx_frames() const { return rx_antennas() / rx_chains; } // M_1
    std::size_t tx_frames() const { return tx_antennas() / tx_chains; } // M_2
    double delay_span() const { return static_cast<double>(taps) * sample_period; }

    // Throws ConfigError on a violated invariant.
    void validate() const;
};

struct ChannelPath {
    std::complex<double> gain;
    double delay = 0.0;          // seconds, absolute
    Eigen::Vector3d arrival;     // receiver frame
    Eigen::Vector3d departure;   // transmitter frame
};

struct ChannelScene {
    std::vector<ChannelPath> paths;
    Eigen::Vector3d tx_position = Eigen::Vector3d::Zero();
    Eigen::Vector3d rx_position = Eigen::Vector3d::Zero();
    // Columns are the array axes (x, y, normal) in world coordinates.
    Eigen::Matrix3d tx_orientation = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d rx_orientation = Eigen::Matrix3d::Identity();
    // Receiver timing reference; tap 0 samples this delay.
    double clock_offset = 0.0;
    // paths[0] is the line-of-sight path.
    bool line_of_sight = false;

    void validate() const;
};

using ChannelTaps = std::vector<Eigen::MatrixXcd>; // D matrices N_R x N_T

struct SoundingFrame {
    std::size_t rx_frame = 0; // m1
    std::size_t tx_frame = 0; // m2
    Eigen::MatrixXcd combiner; // N_R x M_R
    Eigen::MatrixXcd precoder; // N_T x M_T
    Eigen::MatrixXcd pilot;    // M_T x (pre + Q + post)
    Eigen::MatrixXcd whitener; // M_R x M_R lower triangular, empty until whitened
};

struct Codebooks {
    std::vector<Eigen::MatrixXcd> combiners; // M_1 blocks of N_R x M_R
    std::vector<Eigen::MatrixXcd> precoders; // M_2 blocks of N_T x M_T
};

// URA response kron(a_x, a_y) at spatial frequencies (wx, wy).
Eigen::VectorXcd array_response(std::size_t n_x, std::size_t n_y, double wx, double wy);
inline Eigen::VectorXcd array_response(std::size_t n_x, std::size_t n_y, const Eigen::Vector3d& direction)
{
    return array_response(n_x, n_y, direction.x(), direction.y());
}

// H_d = sum_l gain_l a_R a_T^H p(d Ts + clock_offset - delay_l), d = 0..D-1.
ChannelTaps gen_channel_taps(const ChannelScene& scene, const SystemConfig& cfg);

// Column blocks of kron(DFT_x, DFT_y) / sqrt(N).
Codebooks gen_codebooks(const SystemConfig& cfg);

// Unnormalized Sylvester Hadamard matrix; n must be a power of two.
Eigen::MatrixXd hadamard(std::size_t n);

// One pilot per transmit frame: [zeros(pre) | Hadamard rows | zeros(post)].
std::vector<Eigen::MatrixXcd> gen_pilots(const SystemConfig& cfg);

// Frames in order m = m1 * M_2 + m2.
std::vector<SoundingFrame> make_frames(const SystemConfig& cfg);

// Y_m[:, q] = sqrt(P) sum_d W^H H_d F S[:, q + pre - d] + W^H n_q with
// n_q ~ CN(0, noise I). Without a seed the noise term is omitted.
std::vector<Eigen::MatrixXcd> sound_channel(const ChannelTaps& taps, const std::vector<SoundingFrame>& frames,
                                            const SystemConfig& cfg, std::optional<std::uint64_t> noise_seed);

// Sets each frame's whitener to the Cholesky factor of W^H W and returns
// L^{-1} Y_m. Throws ConfigError when W^H W is not positive definite.
std::vector<Eigen::MatrixXcd> whiten_frames(std::vector<SoundingFrame>& frames,
                                            const std::vector<Eigen::MatrixXcd>& observations);

// Receive axes (x, y), conjugated transmit axes (x, y), then delay.
std::vector<Dictionary> estimation_dictionaries(const SystemConfig& cfg);

// Two-factor separable problem: factor 0 carries the receive axes, factor 1
// the transmit axes and the delay.
SeparableProblem assemble_problem(const std::vector<Eigen::MatrixXcd>& whitened,
                                  const std::vector<SoundingFrame>& frames, const SystemConfig& cfg);

struct EstimatedPath {
    std::complex<double> gain;
    double rx_wx = 0.0, rx_wy = 0.0;
    double tx_wx = 0.0, tx_wy = 0.0;
    double delay = 0.0; // relative to the clock offset

    // Unit vector in the array frame; empty when wx^2 + wy^2 > 1.
    std::optional<Eigen::Vector3d> arrival() const;
    std::optional<Eigen::Vector3d> departure() const;
};

// Maps every selected multi-index of `sol` to physical parameters, strongest
// coefficient first. `sol` must come from a problem built by
// assemble_problem with the same configuration.
std::vector<EstimatedPath> extract_paths(const SparseSolution& sol, const SystemConfig& cfg);

// Channel taps synthesized from estimated paths.
ChannelTaps estimated_taps(const std::vector<EstimatedPath>& paths, const SystemConfig& cfg);

// Direction in the array frame from spatial frequencies; empty outside the
// visible region.
std::optional<Eigen::Vector3d> direction_from_frequencies(double wx, double wy);

struct PositionEstimate {
    bool valid = false;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

// Treats `path` as line of sight: transmitter = receiver position +
// c (clock_offset + delay) R_rx u(arrival).
PositionEstimate estimate_position(const EstimatedPath& path, const Eigen::Vector3d& rx_position,
                                   const Eigen::Matrix3d& rx_orientation, double clock_offset);

// Mean over subcarriers of the achievable rate with SVD beamforming and
// water-filling over `streams` eigenmodes. Precoder, combiner and power split
// are designed on `design` and evaluated on `channel`; pass the same taps
// for the perfect-CSI rate.
double spectral_efficiency(const ChannelTaps& channel, const ChannelTaps& design, const SystemConfig& cfg,
                           std::size_t n_subcarriers, std::size_t streams);

} // namespace smomp
