// SPDX-License-Identifier: Apache-2.0

#include "smomp/problem.hpp"

#include <string>

namespace smomp {

void FactorBlock::validate() const
{
    if (measurement.rank() != dictionaries.size() + 1)
        throw ShapeError("factor: measurement rank " + std::to_string(measurement.rank()) + " does not match " +
                         std::to_string(dictionaries.size()) + " dictionaries");
    for (std::size_t k = 0; k < dictionaries.size(); ++k) {
        dictionaries[k].validate();
        if (dictionaries[k].signal_size() != measurement.dim(k + 1))
            throw ShapeError("factor: dictionary " + std::to_string(k) + " has " +
                             std::to_string(dictionaries[k].signal_size()) + " rows, measurement dimension is " +
                             std::to_string(measurement.dim(k + 1)));
    }
}

std::vector<std::size_t> SeparableProblem::layout() const
{
    std::vector<std::size_t> out;
    out.reserve(factors.size());
    for (const auto& f : factors)
        out.push_back(f.dictionaries.size());
    return out;
}

std::vector<const Dictionary*> SeparableProblem::grouped_dictionaries() const
{
    std::vector<const Dictionary*> out;
    for (const auto& f : factors)
        for (const auto& d : f.dictionaries)
            out.push_back(&d);
    return out;
}

void SeparableProblem::validate() const
{
    if (factors.empty())
        throw ShapeError("separable problem: no factors");
    if (observation.rank() != factors.size() + 1)
        throw ShapeError("separable problem: observation rank " + std::to_string(observation.rank()) +
                         " does not match " + std::to_string(factors.size()) + " factors plus one column axis");
    for (std::size_t f = 0; f < factors.size(); ++f) {
        factors[f].validate();
        if (factors[f].observation_size() != observation.dim(f))
            throw ShapeError("separable problem: factor " + std::to_string(f) + " observes " +
                             std::to_string(factors[f].observation_size()) + " entries, observation dimension is " +
                             std::to_string(observation.dim(f)));
    }
}

void DenseProblem::validate() const
{
    if (measurement.rank() != dictionaries.size() + 1)
        throw ShapeError("dense problem: measurement rank does not match dictionary count");
    if (static_cast<std::size_t>(observation.rows()) != measurement.dim(0))
        throw ShapeError("dense problem: observation has " + std::to_string(observation.rows()) +
                         " rows, measurement has " + std::to_string(measurement.dim(0)));
    for (std::size_t k = 0; k < dictionaries.size(); ++k) {
        dictionaries[k].validate();
        if (dictionaries[k].signal_size() != measurement.dim(k + 1))
            throw ShapeError("dense problem: dictionary " + std::to_string(k) + " row count mismatch");
    }
}

} // namespace smomp
