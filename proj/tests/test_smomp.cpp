// SPDX-License-Identifier: Apache-2.0

#include "smomp/momp.hpp"
#include "smomp/smomp.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace smomp;

namespace {

Dictionary make_dictionary(Eigen::MatrixXcd entries)
{
    Dictionary d;
    d.entries = std::move(entries);
    for (Eigen::Index j = 0; j < d.entries.cols(); ++j)
        d.atom_params.push_back(static_cast<double>(j));
    return d;
}

FactorBlock identity_factor(std::size_t n, std::size_t atoms)
{
    FactorBlock f;
    f.measurement = ComplexTensor(IndexSpace{n, n});
    for (std::size_t i = 0; i < n; ++i)
        f.measurement.at({i, i}) = 1.0;
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(atoms));
    for (std::size_t j = 0; j < std::min(n, atoms); ++j)
        e(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0;
    f.dictionaries.push_back(make_dictionary(e));
    return f;
}

SeparableProblem random_problem(std::uint64_t seed, RandomProblemShape shape = {})
{
    std::mt19937_64 rng(seed);
    return random_separable_problem(rng, shape);
}

std::vector<const Dictionary*> dict_ptrs(const DenseProblem& d)
{
    std::vector<const Dictionary*> out;
    for (const auto& x : d.dictionaries)
        out.push_back(&x);
    return out;
}

std::size_t total_dims(const SeparableProblem& p)
{
    std::size_t n = 0;
    for (const auto& f : p.factors)
        n += f.dictionaries.size();
    return n;
}

std::vector<DimensionId> dimension_ids(const SeparableProblem& p)
{
    std::vector<DimensionId> ids;
    for (std::size_t f = 0; f < p.factors.size(); ++f)
        for (std::size_t k = 0; k < p.factors[f].dictionaries.size(); ++k)
            ids.emplace_back(f, k);
    return ids;
}

struct PlantedProblem {
    SeparableProblem problem;
    std::vector<std::size_t> joint;
};

// Two factors whose measurements have orthonormal columns, square DFT-like
// dictionaries, and an observation made of one on-grid joint atom.
PlantedProblem on_grid_single_atom(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    PlantedProblem out;
    for (std::size_t f = 0; f < 2; ++f) {
        FactorBlock b;
        const std::size_t n_dicts = 1 + rng() % 2;
        std::vector<std::size_t> dims{0};
        std::size_t sig = 1;
        for (std::size_t k = 0; k < n_dicts; ++k) {
            const std::size_t n = 2 + rng() % 3;
            b.dictionaries.push_back(build_axis_dictionary(n, n));
            dims.push_back(n);
            sig *= n;
            out.joint.push_back(rng() % n);
        }
        dims[0] = sig + 1;
        const Eigen::MatrixXcd q = random_complex_matrix(rng, sig + 1, sig).householderQr().householderQ() *
                                   Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(sig + 1),
                                                              static_cast<Eigen::Index>(sig));
        b.measurement = ComplexTensor(IndexSpace(dims), std::span<const cplx>(q.data(), static_cast<std::size_t>(q.size())));
        out.problem.factors.push_back(std::move(b));
    }
    const Eigen::VectorXcd col = cplx(0.3, 1.2) * separable_column(out.problem.factors, out.joint);
    out.problem.observation =
        ComplexTensor(IndexSpace{out.problem.factors[0].observation_size(), out.problem.factors[1].observation_size(), 1},
                      std::span<const cplx>(col.data(), static_cast<std::size_t>(col.size())));
    return out;
}

} // namespace

TEST_CASE("smomp_correlation")
{
    SUBCASE("single factor matches the dense correlation")
    {
        auto p = random_problem(1, {.n_factors = 1});
        const auto dense = densify(p);
        const auto a = smomp_correlation(p.observation, p.factors);
        const auto b = momp_correlation(dense.observation, dense.measurement);
        REQUIRE(a.space() == b.space());
        CHECK(test::max_abs_diff(a, b) < 1e-12);
    }
    SUBCASE("identity factors conjugate and transpose the observation")
    {
        SeparableProblem p;
        p.factors = {identity_factor(2, 2), identity_factor(3, 3)};
        std::mt19937_64 rng(3);
        p.observation = test::random_tensor(rng, IndexSpace{2, 3, 2});
        const auto c = smomp_correlation(p.observation, p.factors);
        REQUIRE(c.space() == IndexSpace({2, 2, 3}));
        for (std::size_t m = 0; m < 2; ++m)
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 3; ++b)
                    CHECK(std::abs(c.at({m, a, b}) - std::conj(p.observation.at({a, b, m}))) < 1e-15);
    }
    SUBCASE("random problems match the densified correlation")
    {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            auto p = random_problem(1000 + seed, {.n_factors = 1 + seed % 3});
            const auto dense = densify(p);
            const auto a = smomp_correlation(p.observation, p.factors);
            const auto b = momp_correlation(dense.observation, dense.measurement);
            REQUIRE(a.space() == b.space());
            CHECK(test::max_abs_diff(a, b) <= 1e-12 * std::max(1.0, b.norm()));
            const auto s = smomp_correlation(p.observation, p.factors, false);
            CHECK(test::max_abs_diff(a, s) == 0.0);
        }
    }
}

TEST_CASE("combined_atom")
{
    SUBCASE("one-hot dictionaries select a measurement column")
    {
        std::mt19937_64 rng(4);
        FactorBlock f;
        f.measurement = test::random_tensor(rng, IndexSpace{4, 3, 2});
        f.dictionaries.push_back(make_dictionary(Eigen::MatrixXcd::Identity(3, 3)));
        f.dictionaries.push_back(make_dictionary(Eigen::MatrixXcd::Identity(2, 2)));
        const auto a = combined_atom(f, MultiIndex{2, 1});
        for (std::size_t q = 0; q < 4; ++q)
            CHECK(a(static_cast<Eigen::Index>(q)) == f.measurement.at({q, 2, 1}));
    }
    SUBCASE("identity measurement gives the vectorized outer product")
    {
        std::mt19937_64 rng(5);
        FactorBlock f;
        f.measurement = ComplexTensor(IndexSpace{6, 3, 2});
        for (std::size_t i0 = 0; i0 < 3; ++i0)
            for (std::size_t i1 = 0; i1 < 2; ++i1)
                f.measurement.at({i0 + 3 * i1, i0, i1}) = 1.0;
        f.dictionaries.push_back(make_dictionary(random_complex_matrix(rng, 3, 4)));
        f.dictionaries.push_back(make_dictionary(random_complex_matrix(rng, 2, 4)));
        const auto a = combined_atom(f, MultiIndex{1, 3});
        for (std::size_t i0 = 0; i0 < 3; ++i0)
            for (std::size_t i1 = 0; i1 < 2; ++i1) {
                const cplx e = f.dictionaries[0].entries(static_cast<Eigen::Index>(i0), 1) *
                               f.dictionaries[1].entries(static_cast<Eigen::Index>(i1), 3);
                CHECK(std::abs(a(static_cast<Eigen::Index>(i0 + 3 * i1)) - e) < 1e-15);
            }
    }
    SUBCASE("random factors against an explicit loop")
    {
        std::mt19937_64 rng(6);
        FactorBlock f;
        f.measurement = test::random_tensor(rng, IndexSpace{5, 2, 3, 2});
        f.dictionaries.push_back(make_dictionary(random_complex_matrix(rng, 2, 3)));
        f.dictionaries.push_back(make_dictionary(random_complex_matrix(rng, 3, 4)));
        f.dictionaries.push_back(make_dictionary(random_complex_matrix(rng, 2, 2)));
        const MultiIndex j{2, 0, 1};
        const auto a = combined_atom(f, j);
        for (std::size_t q = 0; q < 5; ++q) {
            cplx s = 0.0;
            for (std::size_t i0 = 0; i0 < 2; ++i0)
                for (std::size_t i1 = 0; i1 < 3; ++i1)
                    for (std::size_t i2 = 0; i2 < 2; ++i2)
                        s += f.measurement.at({q, i0, i1, i2}) *
                             f.dictionaries[0].entries(static_cast<Eigen::Index>(i0), 2) *
                             f.dictionaries[1].entries(static_cast<Eigen::Index>(i1), 0) *
                             f.dictionaries[2].entries(static_cast<Eigen::Index>(i2), 1);
            CHECK(std::abs(a(static_cast<Eigen::Index>(q)) - s) < 1e-13);
        }
    }
    SUBCASE("out-of-range atom")
    {
        auto f = identity_factor(2, 2);
        CHECK_THROWS_AS(combined_atom(f, MultiIndex{2}), RangeError);
        CHECK_THROWS_AS(combined_atom(f, MultiIndex{0, 0}), RangeError);
    }
}

TEST_CASE("project_initialize")
{
    SUBCASE("orthonormal single dictionary picks the strongest correlation")
    {
        SeparableProblem p;
        p.factors = {identity_factor(4, 4)};
        p.observation = ComplexTensor(IndexSpace{4, 1});
        p.observation.at({0, 0}) = 0.5;
        p.observation.at({2, 0}) = cplx(0.0, -2.0);
        const auto corr = smomp_correlation(p.observation, p.factors);
        ProjectionState state(corr, p.factors);
        CHECK(project_initialize(corr, p.factors, state, {0, 0}) == 2);
        CHECK(state.estimate({0, 0}) == 2);
    }
    SUBCASE("a noiseless single on-grid atom is found in every dimension")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto p = on_grid_single_atom(2000 + seed);
            const auto ids = dimension_ids(p.problem);
            const auto corr = smomp_correlation(p.problem.observation, p.problem.factors);
            for (bool reversed : {false, true}) {
                ProjectionState state(corr, p.problem.factors);
                std::vector<std::size_t> chosen(ids.size());
                for (std::size_t n = 0; n < ids.size(); ++n) {
                    const std::size_t g = reversed ? ids.size() - 1 - n : n;
                    chosen[g] = project_initialize(corr, p.problem.factors, state, ids[g]);
                }
                CHECK(chosen == p.joint);
            }
        }
    }
    SUBCASE("matches the literal objective on the densified problem")
    {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            auto p = random_problem(3000 + seed, {.n_factors = 1 + seed % 3});
            const auto dense = densify(p);
            const auto dicts = dict_ptrs(dense);
            const auto corr = smomp_correlation(p.observation, p.factors);
            ProjectionState state(corr, p.factors);
            std::vector<std::optional<std::size_t>> fixed(dicts.size());
            std::size_t g = 0;
            for (auto id : dimension_ids(p)) {
                std::vector<double> ratio;
                for (std::size_t j = 0; j < dicts[g]->atom_count(); ++j)
                    ratio.push_back(test::literal_energy(corr, dicts, fixed, g, j) /
                                    test::literal_energy(dense.measurement, dicts, fixed, g, j));
                const std::size_t got = project_initialize(corr, p.factors, state, id);
                CHECK(ratio[got] >= ratio[test::first_argmax(ratio)] * (1 - 1e-10));
                fixed[g] = got;
                ++g;
            }
        }
    }
    SUBCASE("errors")
    {
        auto p = random_problem(7);
        const auto corr = smomp_correlation(p.observation, p.factors);
        ProjectionState state(corr, p.factors);
        CHECK_THROWS_AS(project_initialize(corr, p.factors, state, {p.factors.size(), 0}), RangeError);
        project_initialize(corr, p.factors, state, {0, 0});
        CHECK_THROWS_AS(project_initialize(corr, p.factors, state, {0, 0}), RangeError);
    }
}

TEST_CASE("project_refine")
{
    SUBCASE("single dimension equals initialization")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto p = random_problem(4000 + seed, {.n_factors = 1, .max_dictionaries = 1});
            const auto corr = smomp_correlation(p.observation, p.factors);
            ProjectionState state(corr, p.factors);
            const std::size_t a = project_initialize(corr, p.factors, state, {0, 0});
            const std::vector<std::size_t> current{0};
            CHECK(project_refine(corr, p.factors, current, {0, 0}) == a);
        }
    }
    SUBCASE("the true atom is a fixed point in the noiseless case")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            std::mt19937_64 rng(5000 + seed);
            auto p = random_separable_problem(rng, {.planted_atoms = 0, .noise = 0.0});
            std::vector<std::size_t> truth;
            for (const auto* d : p.grouped_dictionaries())
                truth.push_back(rng() % d->atom_count());
            const Eigen::VectorXcd col = separable_column(p.factors, truth);
            auto dims = std::vector<std::size_t>(p.observation.space().dims().begin(), p.observation.space().dims().end());
            dims.back() = 1;
            p.observation = ComplexTensor(IndexSpace(dims), std::span<const cplx>(col.data(), static_cast<std::size_t>(col.size())));
            const auto corr = smomp_correlation(p.observation, p.factors);
            const auto ids = dimension_ids(p);
            for (std::size_t g = 0; g < ids.size(); ++g) {
                const std::size_t got = project_refine(corr, p.factors, truth, ids[g]);
                // Another atom can only win by producing a collinear column.
                if (got != truth[g]) {
                    auto other = truth;
                    other[g] = got;
                    const Eigen::VectorXcd c2 = separable_column(p.factors, other);
                    CHECK(std::abs(std::abs(c2.dot(col)) - c2.norm() * col.norm()) <= 1e-10 * c2.norm() * col.norm());
                } else {
                    CHECK(got == truth[g]);
                }
            }
        }
    }
    SUBCASE("matches the literal objective with every other dimension fixed")
    {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            auto p = random_problem(6000 + seed, {.n_factors = 1 + seed % 3});
            const auto dense = densify(p);
            const auto dicts = dict_ptrs(dense);
            const auto corr = smomp_correlation(p.observation, p.factors);
            std::mt19937_64 rng(seed);
            std::vector<std::size_t> current;
            for (const auto* d : dicts)
                current.push_back(rng() % d->atom_count());
            const auto ids = dimension_ids(p);
            for (std::size_t g = 0; g < ids.size(); ++g) {
                std::vector<std::optional<std::size_t>> fixed(current.begin(), current.end());
                fixed[g].reset();
                std::vector<double> ratio;
                for (std::size_t j = 0; j < dicts[g]->atom_count(); ++j)
                    ratio.push_back(test::literal_energy(corr, dicts, fixed, g, j) /
                                    test::literal_energy(dense.measurement, dicts, fixed, g, j));
                const std::size_t got = project_refine(corr, p.factors, current, ids[g]);
                CHECK(ratio[got] >= ratio[test::first_argmax(ratio)] * (1 - 1e-10));
                const std::size_t serial = project_refine(corr, p.factors, current, ids[g], {}, false);
                CHECK(serial == got);
            }
        }
    }
    SUBCASE("a multi-index already in the support is skipped")
    {
        SeparableProblem p;
        p.factors = {identity_factor(3, 3)};
        p.observation = ComplexTensor(IndexSpace{3, 1});
        p.observation.at({1, 0}) = 1.0;
        p.observation.at({2, 0}) = 0.5;
        const auto corr = smomp_correlation(p.observation, p.factors);
        const std::vector<std::size_t> current{0};
        const std::vector<MultiIndex> support{MultiIndex{1}};
        CHECK(project_refine(corr, p.factors, current, {0, 0}) == 1);
        CHECK(project_refine(corr, p.factors, current, {0, 0}, support) == 2);
    }
}

TEST_CASE("residual_update")
{
    SUBCASE("an observation equal to a scaled atom")
    {
        auto p = random_problem(8, {.planted_atoms = 1});
        const std::vector<std::size_t> joint(total_dims(p), 0);
        const Eigen::VectorXcd col = separable_column(p.factors, joint);
        const cplx alpha(1.5, -0.25);
        Eigen::VectorXcd obs = alpha * col;
        auto dims = std::vector<std::size_t>(p.observation.space().dims().begin(), p.observation.space().dims().end());
        dims.back() = 1;
        p.observation = ComplexTensor(IndexSpace(dims),
                                      std::span<const cplx>(obs.data(), static_cast<std::size_t>(obs.size())));
        const std::vector<MultiIndex> support{MultiIndex(joint)};
        const auto u = residual_update(p, support);
        CHECK(std::abs(u.coefficients(0, 0) - alpha) < 1e-10);
        CHECK(u.residual.norm() < 1e-10 * col.norm());
        CHECK_FALSE(u.rank_deficient);
    }
    SUBCASE("orthogonal atoms project independently")
    {
        SeparableProblem p;
        p.factors = {identity_factor(3, 3)};
        p.observation = ComplexTensor(IndexSpace{3, 1});
        p.observation.at({0, 0}) = 2.0;
        p.observation.at({1, 0}) = cplx(0, 1);
        p.observation.at({2, 0}) = 7.0;
        const std::vector<MultiIndex> support{MultiIndex{1}, MultiIndex{0}};
        const auto u = residual_update(p, support);
        CHECK(std::abs(u.coefficients(0, 0) - cplx(0, 1)) < 1e-14);
        CHECK(std::abs(u.coefficients(1, 0) - 2.0) < 1e-14);
        CHECK(std::abs(u.residual.at({2, 0}) - 7.0) < 1e-14);
        CHECK(std::abs(u.residual.at({0, 0})) < 1e-14);
    }
    SUBCASE("matches dense least squares on the densified problem")
    {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            auto p = random_problem(7000 + seed);
            const auto dense = densify(p);
            std::mt19937_64 rng(seed);
            std::vector<MultiIndex> support;
            const auto dicts = p.grouped_dictionaries();
            for (int s = 0; s < 2; ++s) {
                std::vector<std::size_t> j;
                for (const auto* d : dicts)
                    j.push_back(rng() % d->atom_count());
                support.emplace_back(j);
            }
            if (support[0] == support[1])
                support.pop_back();
            Eigen::MatrixXcd a(dense.observation.rows(), static_cast<Eigen::Index>(support.size()));
            for (std::size_t s = 0; s < support.size(); ++s)
                a.col(static_cast<Eigen::Index>(s)) = momp_combined_atom(dense, support[s].coords());
            const Eigen::MatrixXcd ref = a.completeOrthogonalDecomposition().solve(dense.observation);
            const auto u = residual_update(p, support);
            CHECK(test::relative_diff(u.coefficients, ref) < 1e-10);
            const Eigen::MatrixXcd r = dense.observation - a * ref;
            const Eigen::Map<const Eigen::MatrixXcd> got(u.residual.data().data(), r.rows(), r.cols());
            CHECK((got - r).norm() <= 1e-10 * dense.observation.norm());
        }
    }
    SUBCASE("duplicated atoms are flagged rank deficient")
    {
        SeparableProblem p;
        FactorBlock f = identity_factor(2, 2);
        Eigen::MatrixXcd e(2, 3);
        e << 1, 1, 0, 0, 0, 1;
        f.dictionaries[0] = make_dictionary(e);
        p.factors = {f};
        p.observation = ComplexTensor(IndexSpace{2, 1});
        p.observation.at({0, 0}) = 2.0;
        const std::vector<MultiIndex> support{MultiIndex{0}, MultiIndex{1}};
        const auto u = residual_update(p, support);
        CHECK(u.rank_deficient);
        // Minimum-norm split.
        CHECK(std::abs(u.coefficients(0, 0) - 1.0) < 1e-12);
        CHECK(std::abs(u.coefficients(1, 0) - 1.0) < 1e-12);
        CHECK(u.residual.norm() < 1e-12);
    }
}

TEST_CASE("smomp_solve")
{
    SUBCASE("one factor, one dictionary, no refinement is textbook OMP")
    {
        int checked = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            auto p = random_problem(8000 + seed, {.n_factors = 1, .max_dictionaries = 1, .max_atoms = 8});
            const std::size_t n = std::min<std::size_t>(3, max_extractable_atoms(p));
            // Atoms spanning less than n + 1 dimensions leave ties in rounding noise.
            if (std::min(p.factors[0].signal_size(), p.observation_size()) <= n)
                continue;
            ++checked;
            const auto dense = densify(p);
            const Eigen::MatrixXcd a = p.factors[0].matrix() * p.factors[0].dictionaries[0].entries;
            const auto ref = test::textbook_omp(a, dense.observation, n);
            const auto sol = smomp_solve(p, {.n_atoms = n, .refinement_sweeps = 0, .rel_tol = 0.0});
            REQUIRE(sol.support.size() == n);
            for (std::size_t s = 0; s < n; ++s)
                CHECK(sol.support[s][0] == ref.support[s]);
            CHECK(test::relative_diff(sol.coefficients, ref.coefficients) < 1e-9);
        }
        CHECK(checked >= 15);
    }
    SUBCASE("equivalent to the dense solver on random problems")
    {
        int identical = 0;
        const int n_seeds = 120;
        for (int seed = 0; seed < n_seeds; ++seed) {
            auto p = random_problem(9000 + static_cast<std::uint64_t>(seed), {.n_factors = 1 + static_cast<std::size_t>(seed % 3)});
            const std::size_t n = std::min<std::size_t>(3, max_extractable_atoms(p));
            const SolverOptions opt{.n_atoms = n, .refinement_sweeps = static_cast<std::size_t>(seed % 3)};
            const auto a = smomp_solve(p, opt);
            const auto b = momp_solve(densify(p), opt);
            const bool same = a.support == b.support;
            identical += same;
            CHECK(same);
            if (same && a.coefficients.size() > 0)
                CHECK(test::relative_diff(a.coefficients, b.coefficients) < 1e-9);
        }
        CHECK(identical == n_seeds);
    }
    SUBCASE("serial kernels give identical results")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto p = random_problem(9500 + seed);
            const std::size_t n = std::min<std::size_t>(3, max_extractable_atoms(p));
            const auto a = smomp_solve(p, {.n_atoms = n, .refinement_sweeps = 2, .parallel = true});
            const auto b = smomp_solve(p, {.n_atoms = n, .refinement_sweeps = 2, .parallel = false});
            CHECK(a.support == b.support);
            CHECK((a.coefficients - b.coefficients).norm() == 0.0);
        }
    }
    SUBCASE("scaling the observation scales the coefficients")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto p = random_problem(9600 + seed);
            const std::size_t n = std::min<std::size_t>(3, max_extractable_atoms(p));
            const auto a = smomp_solve(p, {.n_atoms = n});
            const cplx alpha(-0.7, 2.1);
            auto q = p;
            for (std::size_t i = 0; i < q.observation.size(); ++i)
                q.observation[i] *= alpha;
            const auto b = smomp_solve(q, {.n_atoms = n});
            CHECK(a.support == b.support);
            CHECK(test::relative_diff(b.coefficients, alpha * a.coefficients) < 1e-9);
        }
    }
    SUBCASE("refinement never lowers the joint objective")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto p = random_problem(9700 + seed);
            const std::size_t n = std::min<std::size_t>(3, max_extractable_atoms(p));
            SolveTrace trace;
            smomp_solve(p, {.n_atoms = n, .refinement_sweeps = 4, .trace = &trace});
            for (const auto& it : trace.iterations) {
                double prev = it.initial_objective;
                for (double o : it.refine_objectives) {
                    CHECK(o >= prev * (1 - 1e-12));
                    prev = o;
                }
            }
        }
    }
    SUBCASE("auxiliary memory stays below the dense measurement size")
    {
        auto p = random_problem(42, {.max_signal = 4, .max_atoms = 8, .min_observation = 6, .max_observation = 8});
        const std::size_t n = std::min<std::size_t>(3, max_extractable_atoms(p));
        const auto sol = smomp_solve(p, {.n_atoms = n});
        CHECK(sol.peak_aux_bytes > 0);
        CHECK(sol.peak_aux_bytes < densified_bytes(p));
    }
    SUBCASE("a zero observation yields an empty support")
    {
        auto p = random_problem(43);
        for (std::size_t i = 0; i < p.observation.size(); ++i)
            p.observation[i] = 0.0;
        const auto sol = smomp_solve(p, {.n_atoms = 2});
        CHECK(sol.support.empty());
        CHECK(sol.residual_norms == std::vector<double>{0.0});
    }
}
