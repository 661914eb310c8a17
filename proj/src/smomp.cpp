// SPDX-License-Identifier: Apache-2.0

#include "smomp/smomp.hpp"

#include "smomp/detail/greedy.hpp"
#include "smomp/least_squares.hpp"

#include <string>

namespace smomp {

namespace {

std::vector<std::size_t> layout_of(std::span<const FactorBlock> factors)
{
    std::vector<std::size_t> out;
    for (const auto& f : factors)
        out.push_back(f.dictionaries.size());
    return out;
}

std::vector<detail::BlockSpec> factor_blocks(std::span<const FactorBlock> factors)
{
    std::vector<detail::BlockSpec> blocks;
    std::size_t g = 0;
    for (const auto& f : factors) {
        detail::BlockSpec b{&f.measurement, {}};
        for (std::size_t k = 0; k < f.dictionaries.size(); ++k)
            b.dims.push_back(g++);
        blocks.push_back(std::move(b));
    }
    return blocks;
}

std::vector<const Dictionary*> grouped(std::span<const FactorBlock> factors)
{
    std::vector<const Dictionary*> out;
    for (const auto& f : factors)
        for (const auto& d : f.dictionaries)
            out.push_back(&d);
    return out;
}

std::vector<std::size_t> iota(std::size_t n)
{
    std::vector<std::size_t> out(n);
    for (std::size_t g = 0; g < n; ++g)
        out[g] = g;
    return out;
}

ComplexTensor contract_factor(const FactorBlock& factor, std::span<const std::size_t> atoms, const detail::Kernels& k)
{
    std::optional<ComplexTensor> held;
    for (std::size_t d = factor.dictionaries.size(); d-- > 0;) {
        const auto& dict = factor.dictionaries[d];
        if (atoms[d] >= dict.atom_count())
            throw RangeError("combined atom: index " + std::to_string(atoms[d]) + " out of range for dictionary " +
                             std::to_string(d));
        const Eigen::VectorXcd atom = dict.entries.col(static_cast<Eigen::Index>(atoms[d]));
        const ComplexTensor& in = held ? *held : factor.measurement;
        held = k.contract_vector(in, d + 1, std::span<const cplx>(atom.data(), static_cast<std::size_t>(atom.size())));
    }
    return held ? std::move(*held) : factor.measurement;
}

// Kronecker product of per-factor combined atoms, factor 0 fastest.
void write_separable_column(std::span<const FactorBlock> factors, std::span<const std::size_t> joint,
                            std::span<cplx> out, const detail::Kernels& k)
{
    std::size_t len = 1;
    out[0] = 1.0;
    std::size_t g = 0;
    for (const auto& f : factors) {
        const ComplexTensor a = contract_factor(f, joint.subspan(g, f.dictionaries.size()), k);
        g += f.dictionaries.size();
        const std::size_t n = a.size();
        // Expand in place from the back so earlier entries are read before overwritten.
        for (std::size_t o = n; o-- > 0;)
            for (std::size_t p = len; p-- > 0;)
                out[p + len * o] = out[p] * a[o];
        len *= n;
    }
}

void check_target(std::span<const std::size_t> layout, DimensionId target)
{
    if (target.first >= layout.size() || target.second >= layout[target.first])
        throw RangeError("projection target (" + std::to_string(target.first) + ", " + std::to_string(target.second) +
                         ") out of range");
}

} // namespace

ComplexTensor smomp_correlation(const ComplexTensor& residual, std::span<const FactorBlock> factors, bool parallel)
{
    const std::size_t n_factors = factors.size();
    if (residual.rank() != n_factors + 1)
        throw ShapeError("smomp_correlation: residual rank " + std::to_string(residual.rank()) + " for " +
                         std::to_string(n_factors) + " factors");
    for (std::size_t f = 0; f < n_factors; ++f)
        if (residual.dim(f) != factors[f].observation_size())
            throw ShapeError("smomp_correlation: factor " + std::to_string(f) + " observation size mismatch");

    const detail::Kernels k{parallel};
    ComplexTensor t(residual.space());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = std::conj(residual[i]);
    for (std::size_t f = 0; f < n_factors; ++f)
        t = k.contract_matrix(t, f, factors[f].matrix());

    const std::size_t n_cols = residual.dim(n_factors);
    if (n_cols > 1)
        t = k.rotate_last_to_front(t);

    std::vector<std::size_t> dims{n_cols};
    for (const auto& f : factors)
        for (std::size_t d = 1; d < f.measurement.rank(); ++d)
            dims.push_back(f.measurement.dim(d));
    t.reshape(IndexSpace(std::move(dims)));
    return t;
}

Eigen::VectorXcd combined_atom(const FactorBlock& factor, const MultiIndex& atom_index)
{
    if (atom_index.size() != factor.dictionaries.size())
        throw RangeError("combined atom: index has " + std::to_string(atom_index.size()) + " coordinates for " +
                         std::to_string(factor.dictionaries.size()) + " dictionaries");
    const ComplexTensor a = contract_factor(factor, atom_index.coords(), detail::Kernels{});
    Eigen::VectorXcd out(static_cast<Eigen::Index>(a.size()));
    for (std::size_t o = 0; o < a.size(); ++o)
        out(static_cast<Eigen::Index>(o)) = a[o];
    return out;
}

Eigen::VectorXcd separable_column(std::span<const FactorBlock> factors, std::span<const std::size_t> joint)
{
    std::size_t n_obs = 1;
    std::size_t n_dims = 0;
    for (const auto& f : factors) {
        n_obs *= f.observation_size();
        n_dims += f.dictionaries.size();
    }
    if (joint.size() != n_dims)
        throw RangeError("separable_column: index rank mismatch");
    Eigen::VectorXcd out(static_cast<Eigen::Index>(n_obs));
    write_separable_column(factors, joint, std::span<cplx>(out.data(), n_obs), detail::Kernels{});
    return out;
}

ProjectionState::ProjectionState(const ComplexTensor& corr, std::span<const FactorBlock> factors, bool parallel,
                                 double score_scale)
    : corr_(&corr),
      layout_(layout_of(factors)),
      kernels_{parallel},
      score_scale_(score_scale),
      numerator_(corr, iota(corr.rank() - 1))
{
    const auto blocks = factor_blocks(factors);
    std::size_t n_dims = 0;
    for (const auto& b : blocks) {
        denominators_.emplace_back(*b.measurement, b.dims);
        n_dims += b.dims.size();
    }
    if (n_dims + 1 != corr.rank())
        throw ShapeError("projection state: correlation rank does not match the factor dimensions");
    chosen_.resize(n_dims);
}

std::optional<std::size_t> ProjectionState::estimate(DimensionId id) const
{
    check_target(layout_, id);
    return chosen_[group_dictionary_index(id.first, id.second, layout_)];
}

std::size_t project_initialize(const ComplexTensor& corr, std::span<const FactorBlock> factors, ProjectionState& state,
                               DimensionId target, std::span<const MultiIndex> support)
{
    if (&corr != state.corr_)
        throw ShapeError("project_initialize: state was built for a different correlation tensor");
    check_target(state.layout_, target);
    const std::size_t g = group_dictionary_index(target.first, target.second, state.layout_);
    if (state.chosen_[g])
        throw RangeError("project_initialize: dimension already estimated");

    const Dictionary& dict = factors[target.first].dictionaries[target.second];
    const auto num = state.numerator_.energies(g, dict, state.kernels_);
    const auto den = state.denominators_[target.first].energies(g, dict, state.kernels_);

    std::vector<bool> mask;
    const bool last = state.order_.size() + 1 == state.chosen_.size();
    if (last) {
        std::vector<std::size_t> joint(state.chosen_.size(), 0);
        for (std::size_t d = 0; d < joint.size(); ++d)
            joint[d] = state.chosen_[d].value_or(0);
        mask = detail::duplicate_mask(support, joint, g, dict.atom_count());
    }
    const std::size_t pick = detail::select_best(detail::objective_ratio(num, den), mask, state.score_scale_);

    const Eigen::VectorXcd atom = dict.entries.col(static_cast<Eigen::Index>(pick));
    if (!last) {
        state.numerator_.fix(g, atom, state.kernels_);
        state.denominators_[target.first].fix(g, atom, state.kernels_);
    }
    state.chosen_[g] = pick;
    state.order_.push_back(target);
    return pick;
}

std::size_t project_refine(const ComplexTensor& corr, std::span<const FactorBlock> factors,
                           std::span<const std::size_t> current, DimensionId target, std::span<const MultiIndex> support,
                           bool parallel, double score_scale)
{
    const auto layout = layout_of(factors);
    check_target(layout, target);
    const auto dicts = grouped(factors);
    if (current.size() != dicts.size())
        throw RangeError("project_refine: current estimate has the wrong rank");
    const std::size_t g = group_dictionary_index(target.first, target.second, layout);
    const detail::Kernels k{parallel};

    std::vector<Eigen::VectorXcd> atoms;
    for (std::size_t d = 0; d < dicts.size(); ++d) {
        if (current[d] >= dicts[d]->atom_count())
            throw RangeError("project_refine: current atom index out of range");
        atoms.push_back(dicts[d]->entries.col(static_cast<Eigen::Index>(current[d])));
    }
    const auto blocks = factor_blocks(factors);
    const detail::BlockCache numerator(corr, iota(dicts.size()));
    const detail::BlockCache denominator(*blocks[target.first].measurement, blocks[target.first].dims);
    const Dictionary& dict = *dicts[g];
    const auto num = numerator.energies_others_fixed(g, dict, atoms, k);
    const auto den = denominator.energies_others_fixed(g, dict, atoms, k);
    const auto mask = detail::duplicate_mask(support, current, g, dict.atom_count());
    return detail::select_best(detail::objective_ratio(num, den), mask, score_scale);
}

ResidualUpdate residual_update(const SeparableProblem& p, std::span<const MultiIndex> support)
{
    p.validate();
    if (support.empty())
        throw RangeError("residual_update: empty support");
    const std::size_t n_obs = p.observation_size();
    const std::size_t n_cols = p.column_count();
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(n_obs), static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s)
        a.col(static_cast<Eigen::Index>(s)) = separable_column(p.factors, support[s].coords());

    const Eigen::Map<const Eigen::MatrixXcd> o(p.observation.data().data(), static_cast<Eigen::Index>(n_obs),
                                               static_cast<Eigen::Index>(n_cols));
    auto ls = solve_least_squares(a, o);
    const Eigen::MatrixXcd r = o - a * ls.coefficients;

    ResidualUpdate out;
    out.residual = ComplexTensor(p.observation.space(),
                                 std::span<const cplx>(r.data(), static_cast<std::size_t>(r.size())));
    out.coefficients = std::move(ls.coefficients);
    out.rank_deficient = ls.rank_deficient;
    return out;
}

SparseSolution smomp_solve(const SeparableProblem& p, const SolverOptions& options)
{
    p.validate();
    detail::GreedyModel model;
    model.observation = p.observation.data();
    model.rows = p.observation_size();
    model.cols = p.column_count();
    model.dictionaries = grouped(p.factors);
    model.blocks = factor_blocks(p.factors);

    const std::span<const FactorBlock> factors(p.factors);
    model.correlate = [&p, factors](const ComplexTensor& residual, const detail::Kernels& k) {
        // View the flattened residual with the observation's factor shape.
        ComplexTensor shaped = residual;
        shaped.reshape(p.observation.space());
        return smomp_correlation(shaped, factors, k.parallel);
    };
    model.atom_column = [factors](std::span<const std::size_t> joint, std::span<cplx> out, const detail::Kernels& k) {
        write_separable_column(factors, joint, out, k);
    };
    return detail::greedy_solve(model, options);
}

} // namespace smomp
