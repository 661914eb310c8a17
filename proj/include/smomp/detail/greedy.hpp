// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "smomp/detail/projection.hpp"
#include "smomp/problem.hpp"

#include <functional>
#include <span>

namespace smomp::detail {

struct GreedyModel {
    // Observation flattened as N^q x N^m, column-major.
    std::span<const cplx> observation;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<const Dictionary*> dictionaries;
    std::vector<BlockSpec> blocks;
    // Correlation tensor (N^m x signal dims) of a flattened residual.
    std::function<ComplexTensor(const ComplexTensor& residual, const Kernels&)> correlate;
    // Writes the measurement-domain column of a joint atom into `out` (length N^q).
    std::function<void(std::span<const std::size_t> joint, std::span<cplx> out, const Kernels&)> atom_column;
};

// Greedy loop: correlate, project, refit all selected atoms by least
// squares, update the residual.
SparseSolution greedy_solve(const GreedyModel& model, const SolverOptions& options);

} // namespace smomp::detail
