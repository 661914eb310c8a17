// SPDX-License-Identifier: Apache-2.0

#include "smomp/kernels.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace smomp;

namespace {

// Element-wise oracle on multi-indices, independent of the kernels' stride arithmetic.
ComplexTensor oracle_mode_product(const ComplexTensor& t, std::size_t mode, const Eigen::MatrixXcd& m)
{
    std::vector<std::size_t> dims(t.space().dims().begin(), t.space().dims().end());
    dims[mode] = static_cast<std::size_t>(m.cols());
    ComplexTensor out{IndexSpace(dims)};
    MultiIndex idx(std::vector<std::size_t>(dims.size(), 0));
    do {
        cplx acc = 0.0;
        MultiIndex src = idx;
        for (std::size_t k = 0; k < t.dim(mode); ++k) {
            src[mode] = k;
            acc += t.at(src) * m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(idx[mode]));
        }
        out.at(idx) = acc;
    } while (out.space().next(idx));
    return out;
}

} // namespace

TEST_CASE("mode products match the multi-index oracle on every mode")
{
    std::mt19937_64 rng(11);
    const auto t = test::random_tensor(rng, IndexSpace{3, 4, 2, 5});
    for (std::size_t mode = 0; mode < t.rank(); ++mode) {
        CAPTURE(mode);
        const Eigen::MatrixXcd m = random_complex_matrix(rng, t.dim(mode), 3);
        const auto expected = oracle_mode_product(t, mode, m);
        const auto serial = kernels::serial::contract_matrix(t, mode, m);
        const auto par = kernels::contract_matrix(t, mode, m);
        CHECK(serial.space() == expected.space());
        CHECK(test::max_abs_diff(serial, expected) < 1e-13);
        CHECK(test::max_abs_diff(par, serial) == 0.0);

        const Eigen::VectorXcd v = m.col(1);
        const std::span<const cplx> vs(v.data(), static_cast<std::size_t>(v.size()));
        const auto cv = kernels::serial::contract_vector(t, mode, vs);
        const auto cvp = kernels::contract_vector(t, mode, vs);
        const auto sliced = tensor_slice(expected, std::vector<std::optional<std::size_t>>(
                                                       [&] {
                                                           std::vector<std::optional<std::size_t>> f(t.rank());
                                                           f[mode] = 1;
                                                           return f;
                                                       }()));
        CHECK(test::max_abs_diff(cv, sliced) < 1e-13);
        CHECK(test::max_abs_diff(cvp, cv) == 0.0);

        const auto e_serial = kernels::serial::mode_energy(t, mode, m);
        const auto e_par = kernels::mode_energy(t, mode, m);
        for (std::size_t j = 0; j < 3; ++j) {
            std::vector<std::optional<std::size_t>> f(t.rank());
            f[mode] = j;
            const double oracle = tensor_slice(expected, f).squared_norm();
            CHECK(e_serial[j] == doctest::Approx(oracle).epsilon(1e-12));
            CHECK(e_par[j] == e_serial[j]);
        }
    }
}

TEST_CASE("parallel kernels are bit-identical to serial on large inputs")
{
    std::mt19937_64 rng(12);
    const auto t = test::random_tensor(rng, IndexSpace{16, 32, 8, 6});
    const Eigen::MatrixXcd m = random_complex_matrix(rng, 32, 20);
    CHECK(test::max_abs_diff(kernels::contract_matrix(t, 1, m), kernels::serial::contract_matrix(t, 1, m)) == 0.0);
    CHECK(kernels::mode_energy(t, 1, m) == kernels::serial::mode_energy(t, 1, m));
    CHECK(kernels::squared_norm(t.data()) == kernels::serial::squared_norm(t.data()));
    CHECK(test::max_abs_diff(kernels::rotate_last_to_front(t), kernels::serial::rotate_last_to_front(t)) == 0.0);
}

TEST_CASE("rotate_last_to_front permutes dimensions")
{
    std::mt19937_64 rng(13);
    const auto t = test::random_tensor(rng, IndexSpace{2, 3, 4});
    const auto r = kernels::rotate_last_to_front(t);
    REQUIRE(r.space() == IndexSpace({4, 2, 3}));
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t c = 0; c < 4; ++c)
                CHECK(r.at({c, a, b}) == t.at({a, b, c}));
}

TEST_CASE("shape errors")
{
    ComplexTensor t(IndexSpace{2, 3});
    const Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(4, 2);
    CHECK_THROWS_AS(kernels::contract_matrix(t, 1, m), ShapeError);
    CHECK_THROWS_AS(kernels::contract_matrix(t, 2, m), ShapeError);
    const std::vector<cplx> v(2);
    CHECK_THROWS_AS(kernels::contract_vector(t, 1, v), ShapeError);
}
