// SPDX-License-Identifier: Apache-2.0
//
// Projection machinery shared by the dense and separable solvers.
//
// A "block" is a tensor whose mode 0 is an observation-like axis and whose
// remaining modes are signal dimensions, each tagged with its grouped
// dictionary index. The correlation tensor is one block spanning every
// dimension; the dense measurement is another; each separable factor is a
// block spanning only its own dimensions.

#pragma once

#include "smomp/dictionary.hpp"
#include "smomp/multiindex.hpp"
#include "smomp/problem.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace smomp::detail {

// Dispatch between the OpenMP kernels and the serial reference.
struct Kernels {
    bool parallel = true;

    ComplexTensor contract_vector(const ComplexTensor& t, std::size_t mode, std::span<const cplx> v) const;
    ComplexTensor contract_matrix(const ComplexTensor& t, std::size_t mode, const Eigen::Ref<const Eigen::MatrixXcd>& m) const;
    std::vector<double> mode_energy(const ComplexTensor& t, std::size_t mode,
                                    const Eigen::Ref<const Eigen::MatrixXcd>& atoms) const;
    ComplexTensor rotate_last_to_front(const ComplexTensor& t) const;
};

// Partial contraction of one block with the atoms fixed so far.
class BlockCache {
public:
    BlockCache(const ComplexTensor& source, std::vector<std::size_t> dims);

    bool owns(std::size_t g) const noexcept;
    bool is_fixed(std::size_t g) const noexcept;

    // Energy of the current partial contraction with dimension g swept over
    // all atoms, summed over the observation axis and every unfixed dimension.
    std::vector<double> energies(std::size_t g, const Dictionary& dict, const Kernels& k) const;

    // Contracts dimension g of the cached tensor with `atom`.
    void fix(std::size_t g, const Eigen::VectorXcd& atom, const Kernels& k);

    // Energy with every other block dimension contracted with its atom in
    // `atoms` (indexed by grouped dimension) and g swept over all atoms.
    std::vector<double> energies_others_fixed(std::size_t g, const Dictionary& dict,
                                              std::span<const Eigen::VectorXcd> atoms, const Kernels& k) const;

    // Energy with every block dimension contracted with its atom.
    double full_energy(std::span<const Eigen::VectorXcd> atoms, const Kernels& k) const;

    std::span<const std::size_t> dims() const noexcept { return dims_; }

private:
    const ComplexTensor& current() const noexcept { return cached_ ? *cached_ : *source_; }
    std::size_t position(std::size_t g) const;

    const ComplexTensor* source_;
    std::optional<ComplexTensor> cached_;
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> remaining_;
};

// Ratio num/den per candidate; zero denominators give -inf.
std::vector<double> objective_ratio(std::span<const double> num, std::span<const double> den);

// First index of the maximum; scores within 1e-12 of each other, relative to
// the larger of the two or to `scale`, keep the smaller index. `scale` is an
// upper bound on every score (the residual energy), so candidates that only
// differ by rounding noise near zero tie. Masked and non-finite candidates
// are skipped; if every candidate is excluded, the first unmasked index is
// returned.
std::size_t select_best(std::span<const double> score, const std::vector<bool>& masked, double scale = 0.0);

// Candidates j of dimension g that would complete a multi-index already in
// `support`, given the other coordinates of `joint`.
std::vector<bool> duplicate_mask(std::span<const MultiIndex> support, std::span<const std::size_t> joint,
                                 std::size_t g, std::size_t atom_count);

struct BlockSpec {
    const ComplexTensor* measurement;
    std::vector<std::size_t> dims;
};

// One projection step (initialization followed by refinement sweeps) over
// the correlation tensor `corr`. Returns the selected atom per dimension.
std::vector<std::size_t> project(const ComplexTensor& corr, std::span<const BlockSpec> blocks,
                                 std::span<const Dictionary* const> dicts, std::span<const MultiIndex> support,
                                 std::size_t refinement_sweeps, double scale, const Kernels& k,
                                 IterationTrace* trace);

// Joint objective |<atom, R>|^2 / ||atom||^2 of a full multi-index.
double joint_objective(const ComplexTensor& corr, std::span<const BlockSpec> blocks,
                       std::span<const Dictionary* const> dicts, std::span<const std::size_t> joint, const Kernels& k);

} // namespace smomp::detail
