// SPDX-License-Identifier: Apache-2.0

#include "smomp/detail/projection.hpp"

#include "smomp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace smomp::detail {

ComplexTensor Kernels::contract_vector(const ComplexTensor& t, std::size_t mode, std::span<const cplx> v) const
{
    return parallel ? kernels::contract_vector(t, mode, v) : kernels::serial::contract_vector(t, mode, v);
}

ComplexTensor Kernels::contract_matrix(const ComplexTensor& t, std::size_t mode,
                                       const Eigen::Ref<const Eigen::MatrixXcd>& m) const
{
    return parallel ? kernels::contract_matrix(t, mode, m) : kernels::serial::contract_matrix(t, mode, m);
}

std::vector<double> Kernels::mode_energy(const ComplexTensor& t, std::size_t mode,
                                         const Eigen::Ref<const Eigen::MatrixXcd>& atoms) const
{
    return parallel ? kernels::mode_energy(t, mode, atoms) : kernels::serial::mode_energy(t, mode, atoms);
}

ComplexTensor Kernels::rotate_last_to_front(const ComplexTensor& t) const
{
    return parallel ? kernels::rotate_last_to_front(t) : kernels::serial::rotate_last_to_front(t);
}

namespace {

std::span<const cplx> as_span(const Eigen::VectorXcd& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

// Contracts every listed dimension except `skip` (pass dims.size() to keep
// none), highest position first so lower positions stay valid.
ComplexTensor contract_all_but(const ComplexTensor& source, std::span<const std::size_t> dims, std::size_t skip,
                               std::span<const Eigen::VectorXcd> atoms, const Kernels& k)
{
    std::optional<ComplexTensor> held;
    for (std::size_t d = dims.size(); d-- > 0;) {
        if (d == skip)
            continue;
        const ComplexTensor& in = held ? *held : source;
        held = k.contract_vector(in, d + 1, as_span(atoms[dims[d]]));
    }
    return held ? std::move(*held) : source;
}

} // namespace

BlockCache::BlockCache(const ComplexTensor& source, std::vector<std::size_t> dims)
    : source_(&source), dims_(std::move(dims)), remaining_(dims_)
{
    if (source.rank() != dims_.size() + 1)
        throw ShapeError("projection block: tensor rank " + std::to_string(source.rank()) + " for " +
                         std::to_string(dims_.size()) + " signal dimensions");
}

bool BlockCache::owns(std::size_t g) const noexcept
{
    return std::find(dims_.begin(), dims_.end(), g) != dims_.end();
}

bool BlockCache::is_fixed(std::size_t g) const noexcept
{
    return owns(g) && std::find(remaining_.begin(), remaining_.end(), g) == remaining_.end();
}

std::size_t BlockCache::position(std::size_t g) const
{
    const auto it = std::find(remaining_.begin(), remaining_.end(), g);
    if (it == remaining_.end())
        throw RangeError("projection block: dimension " + std::to_string(g) + " is not free in this block");
    return 1 + static_cast<std::size_t>(it - remaining_.begin());
}

std::vector<double> BlockCache::energies(std::size_t g, const Dictionary& dict, const Kernels& k) const
{
    return k.mode_energy(current(), position(g), dict.entries);
}

void BlockCache::fix(std::size_t g, const Eigen::VectorXcd& atom, const Kernels& k)
{
    const std::size_t pos = position(g);
    cached_ = k.contract_vector(current(), pos, as_span(atom));
    remaining_.erase(remaining_.begin() + static_cast<std::ptrdiff_t>(pos - 1));
}

std::vector<double> BlockCache::energies_others_fixed(std::size_t g, const Dictionary& dict,
                                                      std::span<const Eigen::VectorXcd> atoms, const Kernels& k) const
{
    const auto it = std::find(dims_.begin(), dims_.end(), g);
    if (it == dims_.end())
        throw RangeError("projection block: dimension " + std::to_string(g) + " not in block");
    const auto skip = static_cast<std::size_t>(it - dims_.begin());
    if (dims_.size() == 1)
        return k.mode_energy(*source_, 1, dict.entries);
    const ComplexTensor reduced = contract_all_but(*source_, dims_, skip, atoms, k);
    return k.mode_energy(reduced, 1, dict.entries);
}

double BlockCache::full_energy(std::span<const Eigen::VectorXcd> atoms, const Kernels& k) const
{
    const ComplexTensor reduced = contract_all_but(*source_, dims_, dims_.size(), atoms, k);
    return kernels::serial::squared_norm(reduced.data());
}

std::vector<double> objective_ratio(std::span<const double> num, std::span<const double> den)
{
    std::vector<double> out(num.size());
    for (std::size_t j = 0; j < num.size(); ++j)
        out[j] = den[j] > 0.0 ? num[j] / den[j] : -std::numeric_limits<double>::infinity();
    return out;
}

std::size_t select_best(std::span<const double> score, const std::vector<bool>& masked, double scale)
{
    constexpr double kTieTolerance = 1e-12;
    std::optional<std::size_t> best;
    std::optional<std::size_t> first_unmasked;
    for (std::size_t j = 0; j < score.size(); ++j) {
        if (!masked.empty() && masked[j])
            continue;
        if (!first_unmasked)
            first_unmasked = j;
        if (!std::isfinite(score[j]))
            continue;
        if (!best) {
            best = j;
            continue;
        }
        const double b = score[*best];
        if (score[j] > b + kTieTolerance * std::max({std::abs(b), std::abs(score[j]), scale}))
            best = j;
    }
    if (best)
        return *best;
    if (first_unmasked)
        return *first_unmasked;
    throw RangeError("select_best: every candidate is masked");
}

std::vector<bool> duplicate_mask(std::span<const MultiIndex> support, std::span<const std::size_t> joint,
                                 std::size_t g, std::size_t atom_count)
{
    std::vector<bool> mask(atom_count, false);
    for (const auto& s : support) {
        bool same_elsewhere = true;
        for (std::size_t d = 0; d < joint.size(); ++d)
            if (d != g && s[d] != joint[d]) {
                same_elsewhere = false;
                break;
            }
        if (same_elsewhere)
            mask[s[g]] = true;
    }
    return mask;
}

namespace {

std::vector<std::size_t> block_of_dims(std::span<const BlockSpec> blocks, std::size_t n_dims)
{
    std::vector<std::size_t> owner(n_dims, blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t g : blocks[b].dims)
            owner.at(g) = b;
    for (std::size_t g = 0; g < n_dims; ++g)
        if (owner[g] == blocks.size())
            throw ShapeError("projection: dimension " + std::to_string(g) + " belongs to no measurement block");
    return owner;
}

std::vector<Eigen::VectorXcd> atoms_of(std::span<const Dictionary* const> dicts, std::span<const std::size_t> joint)
{
    std::vector<Eigen::VectorXcd> atoms;
    atoms.reserve(dicts.size());
    for (std::size_t g = 0; g < dicts.size(); ++g)
        atoms.push_back(dicts[g]->entries.col(static_cast<Eigen::Index>(joint[g])));
    return atoms;
}

std::vector<std::size_t> all_dims(std::size_t n)
{
    std::vector<std::size_t> out(n);
    for (std::size_t g = 0; g < n; ++g)
        out[g] = g;
    return out;
}

} // namespace

double joint_objective(const ComplexTensor& corr, std::span<const BlockSpec> blocks,
                       std::span<const Dictionary* const> dicts, std::span<const std::size_t> joint, const Kernels& k)
{
    const auto atoms = atoms_of(dicts, joint);
    const BlockCache num(corr, all_dims(dicts.size()));
    double den = 1.0;
    for (const auto& b : blocks)
        den *= BlockCache(*b.measurement, b.dims).full_energy(atoms, k);
    return den > 0.0 ? num.full_energy(atoms, k) / den : -std::numeric_limits<double>::infinity();
}

std::vector<std::size_t> project(const ComplexTensor& corr, std::span<const BlockSpec> blocks,
                                 std::span<const Dictionary* const> dicts, std::span<const MultiIndex> support,
                                 std::size_t refinement_sweeps, double scale, const Kernels& k,
                                 IterationTrace* trace)
{
    const std::size_t n_dims = dicts.size();
    const auto owner = block_of_dims(blocks, n_dims);

    BlockCache numerator(corr, all_dims(n_dims));
    std::vector<BlockCache> denominators;
    denominators.reserve(blocks.size());
    for (const auto& b : blocks)
        denominators.emplace_back(*b.measurement, b.dims);

    std::vector<std::size_t> joint(n_dims, 0);

    // Initialization: dimensions in ascending grouped order, each maximizing
    // the normalized correlation with earlier dimensions fixed and later ones
    // marginalized by summed energy.
    for (std::size_t g = 0; g < n_dims; ++g) {
        const Dictionary& dict = *dicts[g];
        const auto num = numerator.energies(g, dict, k);
        const auto den = denominators[owner[g]].energies(g, dict, k);
        std::vector<bool> mask;
        if (g + 1 == n_dims)
            mask = duplicate_mask(support, joint, g, dict.atom_count());
        joint[g] = select_best(objective_ratio(num, den), mask, scale);
        const Eigen::VectorXcd atom = dict.entries.col(static_cast<Eigen::Index>(joint[g]));
        if (g + 1 < n_dims) {
            numerator.fix(g, atom, k);
            denominators[owner[g]].fix(g, atom, k);
        }
    }
    if (trace) {
        trace->initial_index = joint;
        trace->initial_objective = joint_objective(corr, blocks, dicts, joint, k);
    }

    // Refinement: cyclic passes, each dimension re-chosen with all others
    // held at their current estimate.
    const BlockCache full_numerator(corr, all_dims(n_dims));
    std::vector<BlockCache> full_denominators;
    for (const auto& b : blocks)
        full_denominators.emplace_back(*b.measurement, b.dims);

    std::vector<Eigen::VectorXcd> atoms = atoms_of(dicts, joint);
    for (std::size_t sweep = 0; sweep < refinement_sweeps; ++sweep) {
        bool changed = false;
        for (std::size_t g = 0; g < n_dims; ++g) {
            const Dictionary& dict = *dicts[g];
            const auto num = full_numerator.energies_others_fixed(g, dict, atoms, k);
            const auto den = full_denominators[owner[g]].energies_others_fixed(g, dict, atoms, k);
            const auto mask = duplicate_mask(support, joint, g, dict.atom_count());
            const std::size_t pick = select_best(objective_ratio(num, den), mask, scale);
            if (pick != joint[g]) {
                joint[g] = pick;
                atoms[g] = dict.entries.col(static_cast<Eigen::Index>(pick));
                changed = true;
            }
            if (trace)
                trace->refine_objectives.push_back(joint_objective(corr, blocks, dicts, joint, k));
        }
        if (trace)
            trace->sweeps_run = sweep + 1;
        if (!changed)
            break;
    }
    return joint;
}

} // namespace smomp::detail
