// SPDX-License-Identifier: Apache-2.0
//
// Tensor contraction kernels shared by the dense and separable solvers.
//
// Every kernel exists twice: `kernels::serial` holds plain loop versions kept
// as the reference for tests and benchmarks, and `kernels` holds the OpenMP
// versions used by the solvers. The parallel versions distribute whole output
// elements (or whole candidates) over threads and never split a reduction, so
// their results are bit-identical to the serial ones for any thread count.

#pragma once

#include "smomp/multiindex.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace smomp::kernels {

using MatrixRef = Eigen::Ref<const Eigen::MatrixXcd>;

// Contracts dimension `mode` of `t` with the vector `v`:
//   out[a, b] = sum_k t[a, k, b] * v[k]
// The mode is removed from the result. A rank-1 input yields shape (1).
ComplexTensor contract_vector(const ComplexTensor& t, std::size_t mode, std::span<const cplx> v);

// Mode product with a matrix of shape dim(mode) x J:
//   out[a, j, b] = sum_k t[a, k, b] * m(k, j)
ComplexTensor contract_matrix(const ComplexTensor& t, std::size_t mode, const MatrixRef& m);

// Per-candidate energy of a mode product, without materializing it:
//   score[j] = sum_{a,b} | sum_k t[a, k, b] * atoms(k, j) |^2
std::vector<double> mode_energy(const ComplexTensor& t, std::size_t mode, const MatrixRef& atoms);

// Moves the last dimension to the front.
ComplexTensor rotate_last_to_front(const ComplexTensor& t);

// Sum of squared magnitudes, reduced in fixed-size chunks.
double squared_norm(std::span<const cplx> x);

namespace serial {
ComplexTensor contract_vector(const ComplexTensor& t, std::size_t mode, std::span<const cplx> v);
ComplexTensor contract_matrix(const ComplexTensor& t, std::size_t mode, const MatrixRef& m);
std::vector<double> mode_energy(const ComplexTensor& t, std::size_t mode, const MatrixRef& atoms);
ComplexTensor rotate_last_to_front(const ComplexTensor& t);
double squared_norm(std::span<const cplx> x);
} // namespace serial

// Number of worker threads the parallel kernels may use.
int max_threads() noexcept;

} // namespace smomp::kernels
