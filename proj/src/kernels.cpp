// SPDX-License-Identifier: Apache-2.0

#include "smomp/kernels.hpp"

#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smomp::kernels {

namespace {

// Below this many multiply-adds a kernel runs on the calling thread.
constexpr std::size_t kParallelWork = 1u << 14;
constexpr std::size_t kNormChunk = 4096;

struct ModeSplit {
    std::size_t inner;
    std::size_t n;
    std::size_t outer;
};

ModeSplit split(const IndexSpace& space, std::size_t mode)
{
    if (mode >= space.rank())
        throw ShapeError("contraction mode " + std::to_string(mode) + " out of range for rank " +
                         std::to_string(space.rank()));
    const std::size_t inner = space.stride(mode);
    const std::size_t n = space.dim(mode);
    return {inner, n, space.total_size() / (inner * n)};
}

IndexSpace without_mode(const IndexSpace& space, std::size_t mode)
{
    std::vector<std::size_t> dims;
    for (std::size_t d = 0; d < space.rank(); ++d)
        if (d != mode)
            dims.push_back(space.dim(d));
    if (dims.empty())
        dims.push_back(1);
    return IndexSpace(std::move(dims));
}

IndexSpace replace_mode(const IndexSpace& space, std::size_t mode, std::size_t size)
{
    std::vector<std::size_t> dims(space.dims().begin(), space.dims().end());
    dims[mode] = size;
    return IndexSpace(std::move(dims));
}

IndexSpace rotated(const IndexSpace& space)
{
    std::vector<std::size_t> dims;
    dims.push_back(space.dim(space.rank() - 1));
    for (std::size_t d = 0; d + 1 < space.rank(); ++d)
        dims.push_back(space.dim(d));
    return IndexSpace(std::move(dims));
}

void check_rows(const ModeSplit& s, const MatrixRef& m)
{
    if (static_cast<std::size_t>(m.rows()) != s.n)
        throw ShapeError("mode product: matrix has " + std::to_string(m.rows()) + " rows, mode has size " +
                         std::to_string(s.n));
}

} // namespace

int max_threads() noexcept
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---------------------------------------------------------------------------
// Serial reference

namespace serial {

ComplexTensor contract_vector(const ComplexTensor& t, std::size_t mode, std::span<const cplx> v)
{
    const auto s = split(t.space(), mode);
    if (v.size() != s.n)
        throw ShapeError("contract_vector: vector length mismatch");
    ComplexTensor out(without_mode(t.space(), mode));
    for (std::size_t b = 0; b < s.outer; ++b)
        for (std::size_t a = 0; a < s.inner; ++a) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < s.n; ++k)
                acc += t[a + s.inner * (k + s.n * b)] * v[k];
            out[a + s.inner * b] = acc;
        }
    return out;
}

ComplexTensor contract_matrix(const ComplexTensor& t, std::size_t mode, const MatrixRef& m)
{
    const auto s = split(t.space(), mode);
    check_rows(s, m);
    const std::size_t cols = static_cast<std::size_t>(m.cols());
    ComplexTensor out(replace_mode(t.space(), mode, cols));
    for (std::size_t b = 0; b < s.outer; ++b)
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t a = 0; a < s.inner; ++a) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < s.n; ++k)
                    acc += t[a + s.inner * (k + s.n * b)] * m(k, j);
                out[a + s.inner * (j + cols * b)] = acc;
            }
    return out;
}

std::vector<double> mode_energy(const ComplexTensor& t, std::size_t mode, const MatrixRef& atoms)
{
    const auto s = split(t.space(), mode);
    check_rows(s, atoms);
    std::vector<double> score(static_cast<std::size_t>(atoms.cols()), 0.0);
    for (std::size_t j = 0; j < score.size(); ++j) {
        double e = 0.0;
        for (std::size_t b = 0; b < s.outer; ++b)
            for (std::size_t a = 0; a < s.inner; ++a) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < s.n; ++k)
                    acc += t[a + s.inner * (k + s.n * b)] * atoms(k, j);
                e += std::norm(acc);
            }
        score[j] = e;
    }
    return score;
}

ComplexTensor rotate_last_to_front(const ComplexTensor& t)
{
    const std::size_t last = t.space().dim(t.rank() - 1);
    const std::size_t rest = t.size() / last;
    ComplexTensor out(rotated(t.space()));
    for (std::size_t r = 0; r < rest; ++r)
        for (std::size_t l = 0; l < last; ++l)
            out[l + last * r] = t[r + rest * l];
    return out;
}

double squared_norm(std::span<const cplx> x)
{
    double total = 0.0;
    for (std::size_t start = 0; start < x.size(); start += kNormChunk) {
        const std::size_t stop = std::min(x.size(), start + kNormChunk);
        double chunk = 0.0;
        for (std::size_t i = start; i < stop; ++i)
            chunk += std::norm(x[i]);
        total += chunk;
    }
    return total;
}

} // namespace serial

// ---------------------------------------------------------------------------
// OpenMP versions

ComplexTensor contract_vector(const ComplexTensor& t, std::size_t mode, std::span<const cplx> v)
{
    const auto s = split(t.space(), mode);
    if (v.size() != s.n)
        throw ShapeError("contract_vector: vector length mismatch");
    ComplexTensor out(without_mode(t.space(), mode));
    const auto total = static_cast<std::ptrdiff_t>(s.inner * s.outer);
    const bool par = t.size() >= kParallelWork;

#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t e = 0; e < total; ++e) {
        const std::size_t a = static_cast<std::size_t>(e) % s.inner;
        const std::size_t b = static_cast<std::size_t>(e) / s.inner;
        const cplx* base = &t[a + s.inner * s.n * b];
        cplx acc = 0.0;
        for (std::size_t k = 0; k < s.n; ++k)
            acc += base[s.inner * k] * v[k];
        out[static_cast<std::size_t>(e)] = acc;
    }
    return out;
}

ComplexTensor contract_matrix(const ComplexTensor& t, std::size_t mode, const MatrixRef& m)
{
    const auto s = split(t.space(), mode);
    check_rows(s, m);
    const std::size_t cols = static_cast<std::size_t>(m.cols());
    ComplexTensor out(replace_mode(t.space(), mode, cols));
    const auto slabs = static_cast<std::ptrdiff_t>(cols * s.outer);
    const bool par = t.size() * cols >= kParallelWork;

#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t e = 0; e < slabs; ++e) {
        const std::size_t j = static_cast<std::size_t>(e) % cols;
        const std::size_t b = static_cast<std::size_t>(e) / cols;
        const cplx* src = &t[s.inner * s.n * b];
        cplx* dst = &out[s.inner * (j + cols * b)];
        for (std::size_t a = 0; a < s.inner; ++a) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < s.n; ++k)
                acc += src[a + s.inner * k] * m(k, j);
            dst[a] = acc;
        }
    }
    return out;
}

std::vector<double> mode_energy(const ComplexTensor& t, std::size_t mode, const MatrixRef& atoms)
{
    const auto s = split(t.space(), mode);
    check_rows(s, atoms);
    const auto cols = static_cast<std::ptrdiff_t>(atoms.cols());
    std::vector<double> score(static_cast<std::size_t>(cols), 0.0);
    const bool par = t.size() * static_cast<std::size_t>(cols) >= kParallelWork;

#pragma omp parallel for schedule(dynamic, 1) if (par)
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
        double e = 0.0;
        for (std::size_t b = 0; b < s.outer; ++b) {
            const cplx* src = &t[s.inner * s.n * b];
            for (std::size_t a = 0; a < s.inner; ++a) {
                cplx acc = 0.0;
                for (std::size_t k = 0; k < s.n; ++k)
                    acc += src[a + s.inner * k] * atoms(static_cast<Eigen::Index>(k), j);
                e += std::norm(acc);
            }
        }
        score[static_cast<std::size_t>(j)] = e;
    }
    return score;
}

ComplexTensor rotate_last_to_front(const ComplexTensor& t)
{
    const std::size_t last = t.space().dim(t.rank() - 1);
    const auto rest = static_cast<std::ptrdiff_t>(t.size() / last);
    ComplexTensor out(rotated(t.space()));
    const bool par = t.size() >= kParallelWork;

#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t r = 0; r < rest; ++r)
        for (std::size_t l = 0; l < last; ++l)
            out[l + last * static_cast<std::size_t>(r)] = t[static_cast<std::size_t>(r) + static_cast<std::size_t>(rest) * l];
    return out;
}

double squared_norm(std::span<const cplx> x)
{
    const std::size_t n_chunks = (x.size() + kNormChunk - 1) / kNormChunk;
    if (n_chunks <= 1)
        return serial::squared_norm(x);

    std::vector<double> partial(n_chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        const std::size_t start = static_cast<std::size_t>(c) * kNormChunk;
        const std::size_t stop = std::min(x.size(), start + kNormChunk);
        double chunk = 0.0;
        for (std::size_t i = start; i < stop; ++i)
            chunk += std::norm(x[i]);
        partial[static_cast<std::size_t>(c)] = chunk;
    }
    double total = 0.0;
    for (double p : partial)
        total += p;
    return total;
}

} // namespace smomp::kernels
