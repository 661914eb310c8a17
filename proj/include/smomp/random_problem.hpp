// SPDX-License-Identifier: Apache-2.0
//
// Seeded random separable problems for oracle-equivalence checks.

#pragma once

#include "smomp/problem.hpp"

#include <cstdint>
#include <random>

namespace smomp {

struct RandomProblemShape {
    std::size_t n_factors = 2;
    std::size_t max_dictionaries = 3; // per factor
    std::size_t max_signal = 4;       // rows per dictionary
    std::size_t max_atoms = 6;        // columns per dictionary
    std::size_t min_observation = 2;  // per factor
    std::size_t max_observation = 8;  // per factor
    std::size_t max_columns = 2;      // N^m
    std::size_t planted_atoms = 3;    // atoms mixed into the observation
    double noise = 0.1;
};

// Circular complex Gaussian matrix with unit-variance entries.
Eigen::MatrixXcd random_complex_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols);

// Random factors and dictionaries; the observation mixes `planted_atoms`
// random joint atoms with Gaussian noise.
SeparableProblem random_separable_problem(std::mt19937_64& rng, const RandomProblemShape& shape);

// Largest atom count every dictionary can supply.
std::size_t max_extractable_atoms(const SeparableProblem& p);

} // namespace smomp
