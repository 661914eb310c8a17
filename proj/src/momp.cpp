// SPDX-License-Identifier: Apache-2.0

#include "smomp/momp.hpp"

#include "smomp/detail/greedy.hpp"
#include "smomp/kernels.hpp"

#include <string>

namespace smomp {

namespace {

std::vector<std::size_t> dense_shape(const SeparableProblem& sep)
{
    std::vector<std::size_t> dims{sep.observation_size()};
    for (const auto& f : sep.factors)
        for (std::size_t k = 0; k < f.dictionaries.size(); ++k)
            dims.push_back(f.measurement.dim(k + 1));
    return dims;
}

// Writes prod_g atoms[g] contracted against the signal modes of `measurement`.
void contract_atoms(const ComplexTensor& measurement, std::span<const Dictionary* const> dicts,
                    std::span<const std::size_t> joint, std::span<cplx> out, const detail::Kernels& k)
{
    std::optional<ComplexTensor> held;
    for (std::size_t g = dicts.size(); g-- > 0;) {
        const ComplexTensor& in = held ? *held : measurement;
        const Eigen::VectorXcd atom = dicts[g]->entries.col(static_cast<Eigen::Index>(joint[g]));
        held = k.contract_vector(in, g + 1, std::span<const cplx>(atom.data(), static_cast<std::size_t>(atom.size())));
    }
    const ComplexTensor& col = held ? *held : measurement;
    std::copy(col.data().begin(), col.data().end(), out.begin());
}

} // namespace

std::size_t densified_bytes(const SeparableProblem& sep)
{
    std::size_t cells = 1;
    for (std::size_t d : dense_shape(sep))
        cells *= d;
    return cells * sizeof(cplx);
}

DenseProblem densify(const SeparableProblem& sep, std::size_t budget_bytes)
{
    sep.validate();
    const std::size_t bytes = densified_bytes(sep);
    if (bytes > budget_bytes)
        throw CapacityError("densify: dense measurement needs " + std::to_string(bytes) + " bytes, budget is " +
                                std::to_string(budget_bytes),
                            bytes, budget_bytes);

    const std::size_t n_factors = sep.factors.size();
    const std::size_t n_obs = sep.observation_size();
    const std::size_t n_cols = sep.column_count();

    DenseProblem p;
    p.observation = Eigen::Map<const Eigen::MatrixXcd>(sep.observation.data().data(), static_cast<Eigen::Index>(n_obs),
                                                       static_cast<Eigen::Index>(n_cols));
    for (const auto& f : sep.factors)
        for (const auto& d : f.dictionaries)
            p.dictionaries.push_back(d);

    // Row o and column i of the unfolded dense measurement split into
    // per-factor coordinates with factor 0 fastest.
    std::vector<std::size_t> obs_dims, sig_dims;
    for (const auto& f : sep.factors) {
        obs_dims.push_back(f.observation_size());
        sig_dims.push_back(f.signal_size());
    }
    const IndexSpace obs_space(obs_dims), sig_space(sig_dims);
    std::vector<Eigen::Map<const Eigen::MatrixXcd>> mats;
    for (const auto& f : sep.factors)
        mats.push_back(f.matrix());

    p.measurement = ComplexTensor(IndexSpace(dense_shape(sep)));
    const std::size_t n_sig = sig_space.total_size();
    MultiIndex i_idx(std::vector<std::size_t>(n_factors, 0));
    for (std::size_t i = 0; i < n_sig; ++i, sig_space.next(i_idx)) {
        MultiIndex o_idx(std::vector<std::size_t>(n_factors, 0));
        for (std::size_t o = 0; o < n_obs; ++o, obs_space.next(o_idx)) {
            cplx v = 1.0;
            for (std::size_t f = 0; f < n_factors; ++f)
                v *= mats[f](static_cast<Eigen::Index>(o_idx[f]), static_cast<Eigen::Index>(i_idx[f]));
            p.measurement[o + n_obs * i] = v;
        }
    }
    return p;
}

ComplexTensor momp_correlation(const Eigen::Ref<const Eigen::MatrixXcd>& residual, const ComplexTensor& measurement,
                               bool parallel)
{
    if (static_cast<std::size_t>(residual.rows()) != measurement.dim(0))
        throw ShapeError("momp_correlation: residual has " + std::to_string(residual.rows()) +
                         " rows, measurement observes " + std::to_string(measurement.dim(0)));
    ExternalCharge charge(static_cast<std::size_t>(residual.size()) * sizeof(cplx));
    const Eigen::MatrixXcd conj = residual.conjugate();
    return detail::Kernels{parallel}.contract_matrix(measurement, 0, conj);
}

Eigen::VectorXcd momp_combined_atom(const DenseProblem& p, std::span<const std::size_t> joint)
{
    if (joint.size() != p.dictionaries.size())
        throw RangeError("momp_combined_atom: index rank mismatch");
    std::vector<const Dictionary*> dicts;
    for (std::size_t g = 0; g < p.dictionaries.size(); ++g) {
        if (joint[g] >= p.dictionaries[g].atom_count())
            throw RangeError("momp_combined_atom: atom index out of range");
        dicts.push_back(&p.dictionaries[g]);
    }
    Eigen::VectorXcd out(static_cast<Eigen::Index>(p.measurement.dim(0)));
    contract_atoms(p.measurement, dicts, joint, std::span<cplx>(out.data(), static_cast<std::size_t>(out.size())),
                   detail::Kernels{});
    return out;
}

SparseSolution momp_solve(const DenseProblem& p, const SolverOptions& options)
{
    p.validate();
    detail::GreedyModel model;
    model.observation = std::span<const cplx>(p.observation.data(), static_cast<std::size_t>(p.observation.size()));
    model.rows = static_cast<std::size_t>(p.observation.rows());
    model.cols = static_cast<std::size_t>(p.observation.cols());
    for (const auto& d : p.dictionaries)
        model.dictionaries.push_back(&d);

    std::vector<std::size_t> dims(p.dictionaries.size());
    for (std::size_t g = 0; g < dims.size(); ++g)
        dims[g] = g;
    model.blocks.push_back({&p.measurement, dims});

    model.correlate = [&p](const ComplexTensor& residual, const detail::Kernels& k) {
        const Eigen::Map<const Eigen::MatrixXcd> r(residual.data().data(), static_cast<Eigen::Index>(residual.dim(0)),
                                                   static_cast<Eigen::Index>(residual.dim(1)));
        return momp_correlation(r, p.measurement, k.parallel);
    };
    model.atom_column = [&model, &p](std::span<const std::size_t> joint, std::span<cplx> out, const detail::Kernels& k) {
        contract_atoms(p.measurement, model.dictionaries, joint, out, k);
    };
    return detail::greedy_solve(model, options);
}

} // namespace smomp
