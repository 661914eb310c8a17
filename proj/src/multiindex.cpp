// SPDX-License-Identifier: Apache-2.0

#include "smomp/multiindex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smomp {

namespace detail {
AllocationTracker*& active_tracker() noexcept
{
    thread_local AllocationTracker* tracker = nullptr;
    return tracker;
}
} // namespace detail

IndexSpace::IndexSpace(std::vector<std::size_t> dims) : dims_(std::move(dims))
{
    strides_.reserve(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        if (dims_[d] == 0)
            throw ConfigError("IndexSpace: dimension " + std::to_string(d) + " has size 0");
        strides_.push_back(total_);
        total_ *= dims_[d];
    }
}

bool IndexSpace::contains(const MultiIndex& idx) const noexcept
{
    if (idx.size() != dims_.size())
        return false;
    for (std::size_t d = 0; d < dims_.size(); ++d)
        if (idx[d] >= dims_[d])
            return false;
    return true;
}

std::size_t IndexSpace::flatten(const MultiIndex& idx) const
{
    if (idx.size() != dims_.size())
        throw RangeError("flatten: index has " + std::to_string(idx.size()) + " coordinates, space has rank " +
                         std::to_string(dims_.size()));
    std::size_t linear = 0;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        if (idx[d] >= dims_[d])
            throw RangeError("flatten: coordinate " + std::to_string(d) + " = " + std::to_string(idx[d]) +
                             " out of range [0, " + std::to_string(dims_[d]) + ")");
        linear += idx[d] * strides_[d];
    }
    return linear;
}

MultiIndex IndexSpace::unflatten(std::size_t linear) const
{
    if (linear >= total_)
        throw RangeError("unflatten: linear index " + std::to_string(linear) + " >= total size " +
                         std::to_string(total_));
    std::vector<std::size_t> coords(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        coords[d] = linear % dims_[d];
        linear /= dims_[d];
    }
    return MultiIndex(std::move(coords));
}

bool IndexSpace::next(MultiIndex& idx) const noexcept
{
    for (std::size_t d = 0; d < dims_.size(); ++d) {
        if (++idx[d] < dims_[d])
            return true;
        idx[d] = 0;
    }
    return false;
}

std::size_t flatten(const MultiIndex& idx, const IndexSpace& space) { return space.flatten(idx); }

MultiIndex unflatten(std::size_t linear, const IndexSpace& space) { return space.unflatten(linear); }

std::size_t group_dictionary_index(std::size_t f, std::size_t k, std::span<const std::size_t> layout)
{
    if (f >= layout.size())
        throw RangeError("group_dictionary_index: factor " + std::to_string(f) + " out of range");
    if (k >= layout[f])
        throw RangeError("group_dictionary_index: dictionary " + std::to_string(k) + " out of range for factor " +
                         std::to_string(f));
    std::size_t offset = 0;
    for (std::size_t g = 0; g < f; ++g)
        offset += layout[g];
    return offset + k;
}

ComplexTensor::ComplexTensor(IndexSpace space) : space_(std::move(space)), data_(space_.total_size()) {}

ComplexTensor::ComplexTensor(IndexSpace space, std::span<const cplx> values) : space_(std::move(space))
{
    if (values.size() != space_.total_size())
        throw ShapeError("ComplexTensor: " + std::to_string(values.size()) + " values for a space of size " +
                         std::to_string(space_.total_size()));
    data_.assign(values.begin(), values.end());
    if (!all_finite())
        throw ConfigError("ComplexTensor: non-finite entry");
}

ComplexTensor::ComplexTensor(const ComplexTensor& other) : space_(other.space_), data_(other.data_.begin(), other.data_.end())
{
}

ComplexTensor& ComplexTensor::operator=(const ComplexTensor& other)
{
    if (this != &other) {
        space_ = other.space_;
        data_ = TensorStorage(other.data_.begin(), other.data_.end());
    }
    return *this;
}

void ComplexTensor::reshape(IndexSpace space)
{
    if (space.total_size() != data_.size())
        throw ShapeError("reshape: size mismatch");
    space_ = std::move(space);
}

double ComplexTensor::squared_norm() const noexcept
{
    double s = 0.0;
    for (const auto& v : data_)
        s += std::norm(v);
    return s;
}

double ComplexTensor::norm() const noexcept { return std::sqrt(squared_norm()); }

bool ComplexTensor::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ComplexTensor tensor_slice(const ComplexTensor& t, std::span<const std::optional<std::size_t>> fixed)
{
    const auto& space = t.space();
    if (fixed.size() > space.rank())
        throw RangeError("tensor_slice: more fixed coordinates than dimensions");

    std::size_t base = 0;
    std::vector<std::size_t> free_dims;
    std::vector<std::size_t> free_strides;
    for (std::size_t d = 0; d < space.rank(); ++d) {
        if (d < fixed.size() && fixed[d]) {
            if (*fixed[d] >= space.dim(d))
                throw RangeError("tensor_slice: fixed coordinate " + std::to_string(d) + " out of range");
            base += *fixed[d] * space.stride(d);
        } else {
            free_dims.push_back(space.dim(d));
            free_strides.push_back(space.stride(d));
        }
    }
    if (free_dims.empty()) {
        ComplexTensor out(IndexSpace{1});
        out[0] = t[base];
        return out;
    }

    IndexSpace out_space(free_dims);
    ComplexTensor out(out_space);
    MultiIndex idx(std::vector<std::size_t>(free_dims.size(), 0));
    std::size_t linear = 0;
    do {
        std::size_t src = base;
        for (std::size_t d = 0; d < free_dims.size(); ++d)
            src += idx[d] * free_strides[d];
        out[linear++] = t[src];
    } while (out_space.next(idx));
    return out;
}

} // namespace smomp
