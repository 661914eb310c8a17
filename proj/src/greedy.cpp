// SPDX-License-Identifier: Apache-2.0

#include "smomp/detail/greedy.hpp"

#include "smomp/kernels.hpp"
#include "smomp/least_squares.hpp"

#include <algorithm>
#include <string>

namespace smomp::detail {

SparseSolution greedy_solve(const GreedyModel& model, const SolverOptions& options)
{
    const std::size_t n_obs = model.rows;
    const std::size_t n_cols = model.cols;
    if (model.observation.size() != n_obs * n_cols)
        throw ShapeError("solver: observation size does not match its shape");
    const Eigen::Map<const Eigen::MatrixXcd> observation(model.observation.data(), static_cast<Eigen::Index>(n_obs),
                                                         static_cast<Eigen::Index>(n_cols));

    std::size_t min_atoms = std::numeric_limits<std::size_t>::max();
    for (const auto* d : model.dictionaries)
        min_atoms = std::min(min_atoms, d->atom_count());
    if (options.n_atoms > min_atoms)
        throw ConfigError("solver: " + std::to_string(options.n_atoms) + " atoms requested but the smallest dictionary has " +
                          std::to_string(min_atoms));

    const Kernels k{options.parallel};
    SparseSolution out;
    AllocationTracker tracker;
    {
        ScopedTracking scope(tracker);

        ComplexTensor residual(IndexSpace{n_obs, n_cols}, model.observation);
        auto residual_view = [&] {
            return Eigen::Map<Eigen::MatrixXcd>(residual.data().data(), static_cast<Eigen::Index>(n_obs),
                                                static_cast<Eigen::Index>(n_cols));
        };

        const double initial = observation.norm();
        out.residual_norms.push_back(initial);
        out.coefficients.resize(0, static_cast<Eigen::Index>(n_cols));

        if (initial > 0.0 && options.n_atoms > 0) {
            ComplexTensor columns(IndexSpace{n_obs, options.n_atoms});
            for (std::size_t it = 0; it < options.n_atoms; ++it) {
                const ComplexTensor corr = model.correlate(residual, k);

                IterationTrace* iter_trace = nullptr;
                if (options.trace) {
                    options.trace->iterations.emplace_back();
                    iter_trace = &options.trace->iterations.back();
                }
                const double energy = out.residual_norms.back() * out.residual_norms.back();
                auto joint = project(corr, model.blocks, model.dictionaries, out.support, options.refinement_sweeps,
                                     energy, k, iter_trace);

                model.atom_column(joint, columns.data().subspan(it * n_obs, n_obs), k);
                out.support.emplace_back(std::move(joint));

                const Eigen::Map<const Eigen::MatrixXcd> a(columns.data().data(), static_cast<Eigen::Index>(n_obs),
                                                           static_cast<Eigen::Index>(it + 1));
                auto ls = solve_least_squares(a, observation);
                out.rank_deficient = out.rank_deficient || ls.rank_deficient;
                {
                    ExternalCharge product(n_obs * n_cols * sizeof(cplx));
                    residual_view() = observation - a * ls.coefficients;
                }
                out.coefficients = std::move(ls.coefficients);

                const double norm = kernels::squared_norm(residual.data());
                out.residual_norms.push_back(std::sqrt(norm));
                if (out.residual_norms.back() <= options.rel_tol * initial) {
                    out.stopped_early = it + 1 < options.n_atoms;
                    break;
                }
            }
        }
        out.residual = residual_view();
    }
    out.peak_aux_bytes = tracker.peak_bytes();
    return out;
}

} // namespace smomp::detail
