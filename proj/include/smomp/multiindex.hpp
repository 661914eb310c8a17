// SPDX-License-Identifier: Apache-2.0
//
// Multi-index spaces and dense complex tensors.
//
// All tensors are stored first-index-fastest: the linear offset of
// (c_0, c_1, ..., c_{n-1}) is c_0 + d_0 * (c_1 + d_1 * (c_2 + ...)).
// Indices are 0-based throughout.

#pragma once

#include "smomp/errors.hpp"
#include "smomp/memory.hpp"

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace smomp {

using cplx = std::complex<double>;
using TensorStorage = std::vector<cplx, TrackingAllocator<cplx>>;

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<std::size_t> coords) : coords_(std::move(coords)) {}
    MultiIndex(std::initializer_list<std::size_t> coords) : coords_(coords) {}

    std::size_t size() const noexcept { return coords_.size(); }
    std::size_t operator[](std::size_t d) const { return coords_[d]; }
    std::size_t& operator[](std::size_t d) { return coords_[d]; }
    std::span<const std::size_t> coords() const noexcept { return coords_; }

    bool operator==(const MultiIndex&) const = default;
    auto operator<=>(const MultiIndex&) const = default;

private:
    std::vector<std::size_t> coords_;
};

class IndexSpace {
public:
    IndexSpace() = default;
    explicit IndexSpace(std::vector<std::size_t> dims);
    IndexSpace(std::initializer_list<std::size_t> dims) : IndexSpace(std::vector<std::size_t>(dims)) {}

    std::size_t rank() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t d) const { return dims_.at(d); }
    std::span<const std::size_t> dims() const noexcept { return dims_; }
    std::size_t total_size() const noexcept { return total_; }

    // Product of the dimensions strictly before `d`.
    std::size_t stride(std::size_t d) const { return strides_.at(d); }

    bool contains(const MultiIndex& idx) const noexcept;

    std::size_t flatten(const MultiIndex& idx) const;
    MultiIndex unflatten(std::size_t linear) const;

    // Advances `idx` to the next multi-index in ascending flattened order.
    // Returns false after the last one (idx is then reset to all zeros).
    bool next(MultiIndex& idx) const noexcept;

    bool operator==(const IndexSpace& other) const noexcept { return dims_ == other.dims_; }

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

std::size_t flatten(const MultiIndex& idx, const IndexSpace& space);
MultiIndex unflatten(std::size_t linear, const IndexSpace& space);

// Linear index of dictionary k of factor f when all factors' dictionaries
// are listed one after another. `layout[f]` is the dictionary count of factor f.
std::size_t group_dictionary_index(std::size_t f, std::size_t k, std::span<const std::size_t> layout);

class ComplexTensor {
public:
    ComplexTensor() = default;
    explicit ComplexTensor(IndexSpace space);
    ComplexTensor(IndexSpace space, std::span<const cplx> values);

    ComplexTensor(const ComplexTensor& other);
    ComplexTensor(ComplexTensor&&) noexcept = default;
    ComplexTensor& operator=(const ComplexTensor& other);
    ComplexTensor& operator=(ComplexTensor&&) noexcept = default;

    const IndexSpace& space() const noexcept { return space_; }
    std::size_t rank() const noexcept { return space_.rank(); }
    std::size_t dim(std::size_t d) const { return space_.dim(d); }
    std::size_t size() const noexcept { return data_.size(); }

    cplx& operator[](std::size_t linear) { return data_[linear]; }
    const cplx& operator[](std::size_t linear) const { return data_[linear]; }
    cplx& at(const MultiIndex& idx) { return data_[space_.flatten(idx)]; }
    const cplx& at(const MultiIndex& idx) const { return data_[space_.flatten(idx)]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    // Reinterprets the storage with a new shape of equal total size.
    void reshape(IndexSpace space);

    double squared_norm() const noexcept;
    double norm() const noexcept;

    bool all_finite() const noexcept;

private:
    IndexSpace space_;
    TensorStorage data_;
};

// Binds the coordinates given in `fixed` (one optional per dimension) and
// returns the sub-tensor over the remaining dimensions, in their original order.
// A rank-0 result is returned as a one-element tensor of shape (1).
ComplexTensor tensor_slice(const ComplexTensor& t, std::span<const std::optional<std::size_t>> fixed);

} // namespace smomp
