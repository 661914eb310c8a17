// SPDX-License-Identifier: Apache-2.0

#include "smomp/random_problem.hpp"

#include "smomp/smomp.hpp"

#include <algorithm>
#include <cmath>

namespace smomp {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

} // namespace

Eigen::MatrixXcd random_complex_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            m(r, c) = cplx(n(rng), n(rng));
    return m;
}

SeparableProblem random_separable_problem(std::mt19937_64& rng, const RandomProblemShape& shape)
{
    SeparableProblem p;
    std::vector<std::size_t> obs_dims;
    for (std::size_t f = 0; f < shape.n_factors; ++f) {
        FactorBlock factor;
        const std::size_t n_obs = uniform(rng, shape.min_observation, shape.max_observation);
        const std::size_t n_dicts = uniform(rng, 1, shape.max_dictionaries);
        std::vector<std::size_t> dims{n_obs};
        for (std::size_t k = 0; k < n_dicts; ++k) {
            const std::size_t n_sig = uniform(rng, 1, shape.max_signal);
            const std::size_t n_atoms = uniform(rng, std::max(n_sig, shape.planted_atoms), std::max(shape.max_atoms, n_sig));
            Dictionary d;
            d.entries = random_complex_matrix(rng, n_sig, n_atoms);
            for (std::size_t j = 0; j < n_atoms; ++j)
                d.atom_params.push_back(static_cast<double>(j));
            factor.dictionaries.push_back(std::move(d));
            dims.push_back(n_sig);
        }
        IndexSpace space(dims);
        const Eigen::MatrixXcd values = random_complex_matrix(rng, space.total_size(), 1);
        factor.measurement = ComplexTensor(space, std::span<const cplx>(values.data(), space.total_size()));
        p.factors.push_back(std::move(factor));
        obs_dims.push_back(n_obs);
    }

    const std::size_t n_cols = uniform(rng, 1, shape.max_columns);
    std::size_t n_obs = 1;
    for (std::size_t d : obs_dims)
        n_obs *= d;

    Eigen::MatrixXcd obs = shape.noise * random_complex_matrix(rng, n_obs, n_cols);
    const auto dicts = p.grouped_dictionaries();
    for (std::size_t l = 0; l < shape.planted_atoms; ++l) {
        std::vector<std::size_t> joint;
        for (const auto* d : dicts)
            joint.push_back(uniform(rng, 0, d->atom_count() - 1));
        const Eigen::VectorXcd col = separable_column(p.factors, joint);
        obs += col * random_complex_matrix(rng, 1, n_cols);
    }

    obs_dims.push_back(n_cols);
    p.observation = ComplexTensor(IndexSpace(obs_dims), std::span<const cplx>(obs.data(), n_obs * n_cols));
    return p;
}

std::size_t max_extractable_atoms(const SeparableProblem& p)
{
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (const auto* d : p.grouped_dictionaries())
        m = std::min(m, d->atom_count());
    return m;
}

} // namespace smomp
