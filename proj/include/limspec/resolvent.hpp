#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "limspec/kernel.hpp"
#include "limspec/parallel.hpp"

namespace limspec {

/// Map z -> R(z) on a fixed finite-dimensional space, sampled at finitely many
/// points. Meant to satisfy R(a) - R(b) = (a - b) R(a) R(b).
struct PseudoResolvent {
    std::vector<cplx> sample_points;
    std::function<Matrix(cplx)> eval;
    bool selfadjoint = false;
    cplx base_point{};
    std::size_t size = 0;

    /// R(z) = (H - z)^{-1}.
    static PseudoResolvent of_matrix(const Matrix& h, std::vector<cplx> points, cplx base, bool selfadjoint = false);
    static PseudoResolvent zero(std::size_t n, std::vector<cplx> points, cplx base);

    /// R_{za} = 1 - (z - a) R(a).
    Matrix transfer(cplx z) const;
    /// Maximal extension R(a) R_{za}^{-1}. Throws NumericalError when the
    /// smallest singular value of R_{za} is below 1e-10.
    Matrix extended(cplx z) const;
};

struct IdentityCheck {
    double max_residual = 0.0;
    bool passed = true;
    double tol = 0.0;
};

/// Max Frobenius norm of R(a) - R(b) - (a - b) R(a) R(b) over the pairs.
IdentityCheck check_resolvent_identity(const PseudoResolvent& r, const std::vector<std::pair<cplx, cplx>>& pairs,
                                       double tol, Exec exec = Exec::parallel);

/// {a + 1/mu : mu != 0 eigenvalue of R(a)}, a = base point. Eigenvalues below
/// zero_tol * ||R(a)|| count as zero.
std::vector<cplx> resolvent_spectrum_map(const PseudoResolvent& r, double zero_tol = 1e-12);

/// z_n = i 2^n, n = 1..12.
std::vector<cplx> default_ladder();

struct RegularityReport {
    bool regular = false;
    double sup_norm = 0.0;            // sup ||z_n R(z_n)|| over evaluated rungs
    std::vector<double> norms;        // per evaluated rung
    std::vector<std::size_t> skipped; // rungs where R_{za} was numerically singular
};

/// Bounded iff the last two evaluated rungs differ by at most 5 % growth.
RegularityReport is_regular(const PseudoResolvent& r, const std::vector<cplx>& ladder = default_ladder(),
                            Exec exec = Exec::parallel);

/// H_R = ran R(a), N_R = ker R(a), H = a + (R(a)|H_R)^{-1}, or the operator infinity.
struct AssociatedOperator {
    bool infinity = false;
    cplx base_point{};
    Matrix h;          // k x k, in the basis `range_basis`
    Matrix range_basis; // n x k, orthonormal
    Matrix null_basis;  // n x (n - k), orthonormal
    double decomposition_sigma_min = 0.0;

    /// H acting on H_R along N_R and zero on N_R, in the standard basis.
    Matrix full_matrix() const;
    /// (H - z)^{-1} on H_R along N_R, zero on N_R.
    Matrix resolvent(cplx z) const;
};

/// Throws NumericalError when the smallest singular value of [range, null]
/// is below `condition_tol` (the direct sum is numerically degenerate).
AssociatedOperator associated_operator(const PseudoResolvent& r, double rank_tol = 1e-10,
                                       double condition_tol = 1e-8);

/// (compress(A, W_ext) - z)^{-1} restricted to w, where W_ext extends w by
/// `margin` on every side. Points off the kernel's carrier carry the operator
/// infinity: their rows and columns are zero.
Matrix window_resolvent(const LatticeKernel& a, const Window& w, cplx z, std::int64_t margin,
                        std::size_t cap = default_dense_cap);

struct InfinityDetection {
    bool fired = false;
    std::optional<std::size_t> from_index; // first index after which every norm is <= tol
    std::vector<double> norms;
    double tol = 0.0;
};

/// Fires iff the tail of `norms` (from some index on, including the last) stays <= tol.
InfinityDetection detect_infinity(const std::vector<double>& norms, double tol);

}  // namespace limspec
