#pragma once

#include <vector>

#include "limspec/lattice.hpp"

namespace limspec::linalg {

/// Largest singular value (spectral norm) of a dense matrix.
double largest_singular_value(const Matrix& m);

/// Smallest singular value of a tall (rows >= cols) dense matrix via SVD.
/// Reference implementation for the banded kernel below.
double smallest_singular_value_dense(const Matrix& m);

/// Hermitian matrix in lower band storage: entry (i, j) with 0 <= i - j <= b is
/// stored at lower[j * (b + 1) + (i - j)].
class BandedHermitian {
public:
    BandedHermitian(std::size_t n, std::size_t bandwidth);

    std::size_t size() const { return n_; }
    std::size_t bandwidth() const { return b_; }

    cplx& at(std::size_t i, std::size_t j) { return lower_[j * (b_ + 1) + (i - j)]; }
    cplx at(std::size_t i, std::size_t j) const { return lower_[j * (b_ + 1) + (i - j)]; }

    /// Number of eigenvalues strictly below `shift` (Sylvester inertia of
    /// G - shift I via band LDL^H).
    std::size_t count_below(double shift) const;

    /// Gershgorin upper bound on the largest eigenvalue.
    double gershgorin_upper() const;

    Matrix to_dense() const;

private:
    std::size_t n_;
    std::size_t b_;
    std::vector<cplx> lower_;
};

/// Sparse column: (row index, value) pairs.
using SparseColumn = std::vector<std::pair<std::size_t, cplx>>;

/// G = M^H M for a matrix given by sparse columns. `bandwidth` must bound
/// |i - j| over column pairs sharing a row.
BandedHermitian gram_banded(const std::vector<SparseColumn>& cols, std::size_t bandwidth);

struct BisectionOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
};

/// Smallest singular value of M from its Gram matrix by bisection on sigma,
/// each step one inertia count of G - sigma^2 I.
double smallest_singular_value_banded(const BandedHermitian& gram, const BisectionOptions& opts = {});

/// True iff the smallest singular value is below `threshold` (one inertia count).
bool smallest_singular_value_below(const BandedHermitian& gram, double threshold);

}  // namespace limspec::linalg
