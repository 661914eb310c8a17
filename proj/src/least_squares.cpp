// SPDX-License-Identifier: Apache-2.0

#include "smomp/least_squares.hpp"

#include "smomp/errors.hpp"
#include "smomp/memory.hpp"

namespace smomp {

LeastSquaresResult solve_least_squares(const Eigen::Ref<const Eigen::MatrixXcd>& a,
                                       const Eigen::Ref<const Eigen::MatrixXcd>& b, double relative_cutoff)
{
    if (a.rows() != b.rows())
        throw ShapeError("least squares: row count mismatch");

    // The decomposition stores a copy of A plus O(cols) workspace.
    const auto cells = static_cast<std::size_t>(a.rows() * a.cols() + 3 * a.cols() + a.cols() * b.cols());
    ExternalCharge charge(cells * sizeof(std::complex<double>));

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
    cod.setThreshold(relative_cutoff);
    cod.compute(a);

    LeastSquaresResult out;
    out.coefficients = cod.solve(b);
    out.rank = static_cast<std::size_t>(cod.rank());
    out.rank_deficient = out.rank < static_cast<std::size_t>(a.cols());
    return out;
}

} // namespace smomp
