// SPDX-License-Identifier: Apache-2.0
//
// Problem and solution types shared by the dense (MOMP) and separable
// (SMOMP) solvers.

#pragma once

#include "smomp/dictionary.hpp"
#include "smomp/multiindex.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <vector>

namespace smomp {

// One separable factor: a measurement tensor of shape
// N_f^q x N_{f,1}^s x ... x N_{f,Df}^s and one dictionary per signal dimension.
struct FactorBlock {
    ComplexTensor measurement;
    std::vector<Dictionary> dictionaries;

    std::size_t observation_size() const { return measurement.dim(0); }
    // Product of the signal dimensions (columns of the unfolded measurement).
    std::size_t signal_size() const { return measurement.size() / measurement.dim(0); }

    // The measurement unfolded as an N_f^q x signal_size() matrix.
    Eigen::Map<const Eigen::MatrixXcd> matrix() const
    {
        return {measurement.data().data(), static_cast<Eigen::Index>(observation_size()),
                static_cast<Eigen::Index>(signal_size())};
    }

    void validate() const;
};

// Observation O of shape N_1^q x ... x N_F^q x N^m with its factors.
struct SeparableProblem {
    ComplexTensor observation;
    std::vector<FactorBlock> factors;

    std::size_t column_count() const { return observation.dim(observation.rank() - 1); }
    std::size_t observation_size() const { return observation.size() / column_count(); }

    // Dictionary count per factor.
    std::vector<std::size_t> layout() const;
    // All dictionaries in grouped (f, k) order.
    std::vector<const Dictionary*> grouped_dictionaries() const;

    void validate() const;
};

// Observation matrix (N^q x N^m), measurement tensor N^q x N_1^s x ... x N_D^s
// and one dictionary per signal dimension.
struct DenseProblem {
    Eigen::MatrixXcd observation;
    ComplexTensor measurement;
    std::vector<Dictionary> dictionaries;

    void validate() const;
};

struct SparseSolution {
    // Selected atom index per dictionary, in grouped dictionary order.
    std::vector<MultiIndex> support;
    // |support| x N^m least-squares coefficients.
    Eigen::MatrixXcd coefficients;
    // Residual Frobenius norm before the first and after every iteration.
    std::vector<double> residual_norms;
    // Final residual, flattened N^q x N^m.
    Eigen::MatrixXcd residual;

    bool rank_deficient = false;
    bool stopped_early = false;
    std::size_t peak_aux_bytes = 0;
};

// Diagnostics for one greedy iteration. Objectives are the full joint
// matching objective |<atom, R>|^2 / ||atom||^2 summed over residual columns.
struct IterationTrace {
    std::vector<std::size_t> initial_index;
    double initial_objective = 0.0;
    // Objective after each refinement step, in order.
    std::vector<double> refine_objectives;
    std::size_t sweeps_run = 0;
};

struct SolveTrace {
    std::vector<IterationTrace> iterations;
};

struct SolverOptions {
    std::size_t n_atoms = 1;
    std::size_t refinement_sweeps = 1;
    // Stop once the residual norm falls below rel_tol times the observation norm.
    double rel_tol = 1e-6;
    // Use the OpenMP kernels; false selects the serial reference kernels.
    bool parallel = true;
    // Optional diagnostics sink; costs one extra contraction per step.
    SolveTrace* trace = nullptr;
};

} // namespace smomp
