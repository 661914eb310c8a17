// SPDX-License-Identifier: Apache-2.0
//
// Dense multidimensional OMP. Operates on the fully materialized
// measurement tensor and serves as the reference for the separable solver.

#pragma once

#include "smomp/problem.hpp"

#include <cstddef>

namespace smomp {

inline constexpr std::size_t kDefaultDenseBudgetBytes = std::size_t{64} << 20;

// Bytes of the dense measurement tensor densify() would allocate.
std::size_t densified_bytes(const SeparableProblem& sep);

// Materializes the equivalent dense problem:
//   measurement[o, i] = prod_f Phi_f[o_f, i_f], observation[o, :] = O[o, :],
// with o and i flattened first-index-fastest and the dictionaries listed in
// grouped (f, k) order. Throws CapacityError before allocating if the
// measurement would exceed `budget_bytes`.
DenseProblem densify(const SeparableProblem& sep, std::size_t budget_bytes = kDefaultDenseBudgetBytes);

// Correlation tensor O_Phi[:, i] = R^H Phi[:, i], shape N^m x signal dims.
ComplexTensor momp_correlation(const Eigen::Ref<const Eigen::MatrixXcd>& residual, const ComplexTensor& measurement,
                               bool parallel = true);

// Measurement-domain column sum_i Phi[:, i] prod_k Psi_k[i_k, j_k].
Eigen::VectorXcd momp_combined_atom(const DenseProblem& p, std::span<const std::size_t> joint);

SparseSolution momp_solve(const DenseProblem& p, const SolverOptions& options);

} // namespace smomp
