// SPDX-License-Identifier: Apache-2.0
//
// Separable multidimensional OMP.
//
// Solves the separable problem directly from its factors: the correlation
// tensor is built by successive per-factor contractions, the projection
// denominators only involve the factor that owns the dimension being chosen,
// and the residual update assembles Kronecker-structured atom columns from
// per-factor combined atoms. The dense measurement is never formed.

#pragma once

#include "smomp/detail/projection.hpp"
#include "smomp/problem.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace smomp {

// (factor, dictionary-within-factor) pair.
using DimensionId = std::pair<std::size_t, std::size_t>;

// O_Phi[:, i] = sum_o O_res[o, :]^H prod_f Phi_f[o_f, i_f].
// `residual` has shape N_1^q x ... x N_F^q x N^m; the result has shape
// N^m x (every N_{f,k}^s in grouped order).
ComplexTensor smomp_correlation(const ComplexTensor& residual, std::span<const FactorBlock> factors,
                                bool parallel = true);

// sum_{i_f} Phi_f[:, i_f] prod_k Psi_{f,k}[i_{f,k}, j_k]  (length N_f^q).
Eigen::VectorXcd combined_atom(const FactorBlock& factor, const MultiIndex& atom_index);

// Estimated dimensions and the cached partial contractions of the
// correlation tensor and of every factor measurement with their atoms.
class ProjectionState {
public:
    // `score_scale` is the tie floor passed to the argmax (see select_best);
    // the solver uses the current residual energy.
    ProjectionState(const ComplexTensor& corr, std::span<const FactorBlock> factors, bool parallel = true,
                    double score_scale = 0.0);

    std::optional<std::size_t> estimate(DimensionId id) const;
    // Estimated dimensions in the order they were fixed.
    const std::vector<DimensionId>& estimated() const noexcept { return order_; }

private:
    friend std::size_t project_initialize(const ComplexTensor& corr, std::span<const FactorBlock> factors,
                                          ProjectionState& state, DimensionId target,
                                          std::span<const MultiIndex> support);

    const ComplexTensor* corr_;
    std::vector<std::size_t> layout_;
    detail::Kernels kernels_;
    double score_scale_;
    detail::BlockCache numerator_;
    std::vector<detail::BlockCache> denominators_;
    std::vector<std::optional<std::size_t>> chosen_;
    std::vector<DimensionId> order_;
};

// Chooses the atom of `target` maximizing the normalized correlation with the
// already estimated dimensions fixed and the remaining ones marginalized by
// summed energy; the denominator only involves the target's factor. The
// choice is recorded in `state`. When every other dimension is estimated,
// atoms completing a multi-index in `support` are excluded.
std::size_t project_initialize(const ComplexTensor& corr, std::span<const FactorBlock> factors, ProjectionState& state,
                               DimensionId target, std::span<const MultiIndex> support = {});

// Re-chooses the atom of `target` with every other dimension held at
// `current` (grouped order). The denominator is the squared norm of the
// target factor's combined atom; other factors cancel.
std::size_t project_refine(const ComplexTensor& corr, std::span<const FactorBlock> factors,
                           std::span<const std::size_t> current, DimensionId target,
                           std::span<const MultiIndex> support = {}, bool parallel = true,
                           double score_scale = 0.0);

struct ResidualUpdate {
    Eigen::MatrixXcd coefficients;
    // Same shape as the observation.
    ComplexTensor residual;
    bool rank_deficient = false;
};

// Joint least squares over all selected multi-indices.
ResidualUpdate residual_update(const SeparableProblem& p, std::span<const MultiIndex> support);

// Measurement-domain column of a joint multi-index: Kronecker product of the
// per-factor combined atoms, flattened factor 0 fastest.
Eigen::VectorXcd separable_column(std::span<const FactorBlock> factors, std::span<const std::size_t> joint);

SparseSolution smomp_solve(const SeparableProblem& p, const SolverOptions& options);

} // namespace smomp
