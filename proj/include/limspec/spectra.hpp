#pragma once

#include <optional>
#include <string>
#include <vector>

#include "limspec/kernel.hpp"
#include "limspec/limit_ops.hpp"
#include "limspec/parallel.hpp"

namespace limspec {

enum class EstimateKind { real_intervals, complex_cells, points };
std::string to_string(EstimateKind k);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool exact = false;  // every contributing limit used an exact route
    std::string provenance;

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct GridCell {
    cplx center{};
    double half_width = 0.0;
    bool exact = false;
    std::string provenance;

    friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct SpectrumEstimate {
    EstimateKind kind = EstimateKind::points;
    std::vector<Interval> intervals;  // disjoint, sorted
    std::vector<GridCell> cells;
    std::vector<cplx> points;
    double tolerance = 0.0;
    std::vector<std::string> provenance;

    bool empty() const { return intervals.empty() && cells.empty() && points.empty(); }

    friend bool operator==(const SpectrumEstimate&, const SpectrumEstimate&) = default;
};

/// Merges [lo, hi] pairs whose gap is at most merge_tol; result sorted and disjoint.
std::vector<Interval> merge_intervals(std::vector<Interval> in, double merge_tol);

/// Hausdorff distance between unions of closed intervals; +inf if exactly one is empty, 0 if both are.
double hausdorff(const std::vector<Interval>& a, const std::vector<Interval>& b);
/// Hausdorff distance between finite point sets in C.
double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Eigenvalues of the window compression restricted to the kernel's carrier.
/// Real and sorted when selfadjoint.
SpectrumEstimate window_spectrum(const LatticeKernel& a, const Window& w, bool selfadjoint);

/// Spectrum of the translation-invariant (p = 1) or period-p operator on Z
/// from its Bloch symbol sampled at `theta_samples` points. Hermitian symbols
/// give merged bands, others grid cells of the given width around the curve.
SpectrumEstimate symbol_spectrum(const HopMap& hop, const std::vector<cplx>& periodic_values,
                                 std::size_t theta_samples = 4096, double cell_width = 0.05);

struct LambdaGrid {
    bool complex_grid = false;
    double re_lo = 0.0, re_hi = 0.0;
    double im_lo = 0.0, im_hi = 0.0;
    double step = 0.01;

    static LambdaGrid real(double lo, double hi, double step);
    static LambdaGrid box(double re_lo, double re_hi, double im_lo, double im_hi, double step);
    /// Points lo + i * step in row-major (imaginary outer) order.
    std::vector<cplx> points() const;
};

enum class Route { symbol, fiber, window };
std::string to_string(Route r);

struct UnionOptions {
    double tol = 0.05;
    /// Window sides tried in order; the sweep stops once two consecutive sides
    /// agree on `agreement` of the grid or the next side exceeds the cap.
    std::vector<std::int64_t> window_sides{64, 128, 256};
    double agreement = 0.99;
    std::size_t symbol_samples = 4096;  // per dimension in 1-D, root-reduced in higher d
    std::size_t fiber_samples = 64;     // Bloch momenta per invariant coordinate
    std::size_t dense_cap = default_dense_cap;
};

struct LambdaSample {
    cplx lambda{};
    double nu = 0.0;
    double nu_adjoint = 0.0;
    std::string limit_id;  // minimizing limit
    bool member = false;

    friend bool operator==(const LambdaSample&, const LambdaSample&) = default;
};

struct RouteInfo {
    std::string limit_id;
    Route route = Route::window;
    bool selfadjoint = false;

    friend bool operator==(const RouteInfo&, const RouteInfo&) = default;
};

struct EssentialSpectrum {
    std::vector<LambdaSample> samples;
    SpectrumEstimate estimate;
    std::vector<RouteInfo> routes;
    std::optional<std::int64_t> window_side;  // largest side used by window routes
    bool stabilized = true;
    std::vector<double> agreement_history;
    std::vector<std::string> warnings;
    std::size_t evaluations = 0;  // lower-norm evaluations performed
};

/// Sp_ess as the union over finite limits B of {lambda : min(nu(B - lambda),
/// nu((B - lambda)^*)) < tol}. Exact routes (symbol, fiber with exact symbol)
/// judge membership at the grid resolution instead of tol. Infinity limits
/// contribute nothing; NoLimit entries throw PreconditionError.
EssentialSpectrum essential_spectrum_union(const std::vector<LimitOperator>& limits, const LambdaGrid& grid,
                                           const UnionOptions& opts = {}, Exec exec = Exec::parallel);

struct FredholmEntry {
    std::string limit_id;
    double nu = 0.0;
    double nu_adjoint = 0.0;

    friend bool operator==(const FredholmEntry&, const FredholmEntry&) = default;
};

struct FredholmVerdict {
    cplx lambda{};
    bool fredholm = true;
    std::vector<FredholmEntry> per_limit;
    double sup_inverse_norm = 0.0;  // +inf when some lower norm vanishes

    friend bool operator==(const FredholmVerdict&, const FredholmVerdict&) = default;
};

/// A - lambda is Fredholm iff every finite limit B has both lower norms of
/// B - lambda at least tol (largest window for window routes).
FredholmVerdict fredholm_test(const std::vector<LimitOperator>& limits, cplx lambda, const UnionOptions& opts = {});

/// Self-adjoint cross-check: eigenvalues of far windows whose eigenvectors
/// keep less than `boundary_mass` of their mass within `margin` of the window
/// boundary, merged with `merge_tol`. Heuristic; throws PreconditionError for
/// non-self-adjoint input, where truncation pollutes the spectrum.
SpectrumEstimate direct_essential_estimate(const LatticeKernel& a, const std::vector<Window>& far_windows,
                                           double boundary_mass = 0.1, std::int64_t margin = 2,
                                           double merge_tol = 0.05, Exec exec = Exec::parallel);

}  // namespace limspec
