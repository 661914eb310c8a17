// SPDX-License-Identifier: Apache-2.0
//
// End-to-end verification suites: solver oracle equivalence, recovery,
// memory, timing, statistics and reproducibility checks. Each returns a
// pass flag with a one-line human-readable detail.

#pragma once

#include "smomp/problem.hpp"

#include <cstddef>
#include <filesystem>
#include <string>

namespace smomp {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

// Residual behaviour collected over every solve in the suites that take one.
struct ResidualAudit {
    std::size_t solves = 0;
    std::size_t monotone_failures = 0;
    std::size_t orthogonality_failures = 0;
    double worst_orthogonality = 0.0;

    // Checks one SMOMP solution of `p`.
    void record(const SeparableProblem& p, const SparseSolution& sol);
    // Checks one MOMP solution of `p`.
    void record(const DenseProblem& p, const SparseSolution& sol);
    CheckResult result() const;
};

// SMOMP support and coefficients against MOMP on the densified problem.
CheckResult check_oracle_equivalence(std::size_t instances, ResidualAudit& audit);
// Single factor, single dictionary, no refinement against textbook OMP.
CheckResult check_omp_reduction(std::size_t instances, ResidualAudit& audit);
// Densified assembled measurement against the direct single-matrix formula.
CheckResult check_formulation_equivalence();
// Noiseless on-grid channels with 1..3 separated paths on both desk presets.
CheckResult check_exact_recovery(std::size_t seeds, ResidualAudit& audit);
// SMOMP auxiliary peak against the dense measurement size on system1-desk.
CheckResult check_memory_contract();
// Median SMOMP against median MOMP solve time on system1-desk.
CheckResult check_speed_ordering(std::size_t repetitions);
// Empirical covariance of whitened noise against noise * I.
CheckResult check_whitening(std::size_t samples);
// Noiseless on-grid position error bound and power-sweep trend.
CheckResult check_localization(std::size_t seeds);
// Two identical runs in `scratch` produce byte-identical trials.csv.
CheckResult check_determinism(const std::filesystem::path& scratch);

} // namespace smomp
