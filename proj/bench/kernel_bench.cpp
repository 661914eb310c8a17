// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP counterparts: median time
// over repetitions and the largest output difference.

#include "smomp/kernels.hpp"
#include "smomp/momp.hpp"
#include "smomp/random_problem.hpp"
#include "smomp/smomp.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

using namespace smomp;

namespace {

double median_ms(const std::function<void()>& f, int reps)
{
    std::vector<double> t;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

ComplexTensor random_tensor(std::mt19937_64& rng, std::vector<std::size_t> dims)
{
    IndexSpace space(std::move(dims));
    const Eigen::MatrixXcd v = random_complex_matrix(rng, space.total_size(), 1);
    return ComplexTensor(space, std::span<const cplx>(v.data(), space.total_size()));
}

void row(const char* kernel, const char* shape, const std::function<ComplexTensor()>& ser,
         const std::function<ComplexTensor()>& par, int reps)
{
    ComplexTensor a, b;
    const double ts = median_ms([&] { a = ser(); }, reps);
    const double tp = median_ms([&] { b = par(); }, reps);
    std::printf("%-22s %-18s %10.3f %10.3f %8.2f %10.1e\n", kernel, shape, ts, tp, ts / tp, max_diff(a.data(), b.data()));
}

} // namespace

int main()
{
    std::mt19937_64 rng(1);
    const int reps = 9;
    std::printf("threads: %d\n", kernels::max_threads());
    std::printf("%-22s %-18s %10s %10s %8s %10s\n", "kernel", "shape", "serial_ms", "openmp_ms", "speedup", "max_diff");

    for (std::size_t n : {16, 64, 128}) {
        const auto t = random_tensor(rng, {n, n, 8, 8});
        const Eigen::MatrixXcd m = random_complex_matrix(rng, 8, 32);
        char shape[32];
        std::snprintf(shape, sizeof shape, "%zux%zux8x8", n, n);
        row("contract_matrix", shape, [&] { return kernels::serial::contract_matrix(t, 2, m); },
            [&] { return kernels::contract_matrix(t, 2, m); }, reps);
        const Eigen::VectorXcd v = random_complex_matrix(rng, n, 1);
        const std::span<const cplx> vs(v.data(), n);
        row("contract_vector", shape, [&] { return kernels::serial::contract_vector(t, 0, vs); },
            [&] { return kernels::contract_vector(t, 0, vs); }, reps);
        const Eigen::MatrixXcd atoms = random_complex_matrix(rng, 8, 64);
        auto energy = [&](bool par) {
            const auto e = par ? kernels::mode_energy(t, 3, atoms) : kernels::serial::mode_energy(t, 3, atoms);
            ComplexTensor out(IndexSpace{e.size()});
            for (std::size_t i = 0; i < e.size(); ++i)
                out[i] = e[i];
            return out;
        };
        row("mode_energy", shape, [&] { return energy(false); }, [&] { return energy(true); }, reps);
    }

    // Solver-level correlations on a random separable problem.
    RandomProblemShape shape;
    shape.max_signal = 6;
    shape.max_atoms = 8;
    shape.min_observation = 16;
    shape.max_observation = 24;
    const SeparableProblem p = random_separable_problem(rng, shape);
    row("smomp_correlation", "random 2-factor",
        [&] { return smomp_correlation(p.observation, p.factors, false); },
        [&] { return smomp_correlation(p.observation, p.factors, true); }, reps);
    const DenseProblem d = densify(p);
    row("momp_correlation", "random 2-factor", [&] { return momp_correlation(d.observation, d.measurement, false); },
        [&] { return momp_correlation(d.observation, d.measurement, true); }, reps);
    return 0;
}
