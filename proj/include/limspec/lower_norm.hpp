#pragma once

#include <optional>
#include <vector>

#include "limspec/kernel.hpp"
#include "limspec/parallel.hpp"

namespace limspec {

/// Columns Omega inside a window. Used with an operator of bandwidth r, every
/// point of the mask must sit at depth > r so that A u is computed exactly.
struct SupportRegion {
    Window window;
    std::vector<Point> mask;

    /// Mask = points of `w` at depth > margin.
    static SupportRegion interior(const Window& w, std::int64_t margin);
    /// Throws MarginError unless every mask point has depth > bandwidth.
    void check_margin(std::int64_t bandwidth) const;
};

enum class NuMethod {
    dense,   // rectangular SVD; reference
    banded,  // Gram matrix inertia + bisection
    automatic,
};

struct LowerNormResult {
    double value = 0.0;
    /// Minimizing unit vector over the columns (dense method only).
    Vector witness;
};

/// Smallest singular value of the block with columns `cols` and rows
/// expand(cols, bandwidth). Off-carrier columns are dropped; an empty column
/// set gives +inf.
double lower_norm(const LatticeKernel& a, const std::vector<Point>& cols, NuMethod method = NuMethod::automatic);

/// Dense lower norm with its minimizing right singular vector (ordered as the
/// carrier-filtered, sorted columns returned in `cols_used`).
LowerNormResult lower_norm_with_witness(const LatticeKernel& a, const std::vector<Point>& cols,
                                        std::vector<Point>* cols_used = nullptr);

/// nu(A | Omega).
double nu_local(const LatticeKernel& a, const SupportRegion& region, NuMethod method = NuMethod::automatic);

/// Side of the largest box with diameter < theta.
std::int64_t box_side_below(double theta);

struct NuThetaResult {
    double value = 0.0;
    Point corner;                 // lowest-lex corner among minimizing boxes
    std::vector<Point> support;   // Omega intersected with that box
    Vector witness;               // only when requested
    std::size_t boxes = 0;
};

/// nu_theta(A | Omega): min of nu over Omega intersected with every box of
/// diameter < theta (stride 1).
NuThetaResult nu_theta_detail(const LatticeKernel& a, const std::vector<Point>& omega, double theta,
                              bool want_witness = false, NuMethod method = NuMethod::automatic,
                              Exec exec = Exec::parallel);
double nu_theta(const LatticeKernel& a, const SupportRegion& region, double theta,
                NuMethod method = NuMethod::automatic, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Sparsification
// ---------------------------------------------------------------------------

struct WeightedPoint {
    Point point;
    double weight = 0.0;
};

struct SparseDecomposition {
    std::vector<std::vector<Point>> parts;
    double gap = 0.0;
    std::int64_t block_length = 0;
    std::vector<std::int64_t> offsets;  // per coordinate
    std::int64_t max_diameter = 0;
    double kept_fraction = 0.0;
};

/// ceil(R / (1 - c^{1/d})), with a relative guard so that exact quotients are
/// not pushed up by rounding.
std::int64_t sparsify_block_length(double gap, double target, int dim);

/// Blocks of length D per coordinate; the last ceil(R) positions of every
/// block are dropped. Offsets are chosen one coordinate at a time to maximize
/// the kept weight (ties: smallest offset), which keeps at least a fraction c.
/// Parts are the kept positive-weight points grouped by block.
SparseDecomposition sparsify(const std::vector<WeightedPoint>& weights, double gap, double target);

/// Minimum inf-distance between points of different parts (+inf for < 2 parts).
double part_separation(const SparseDecomposition& dec);

// ---------------------------------------------------------------------------
// Lemma checks
// ---------------------------------------------------------------------------

struct NucConstants {
    double norm_bound = 0.0;  // l
    double eps = 0.0;
    double c = 0.0;
    double gap = 0.0;         // R = 2r + 1
    std::int64_t block_length = 0;
    double theta = 0.0;
};

/// c = (1 + (eps'/(6 l))^2)^{-1} with eps' = eps / 2, R = 2r + 1, theta = block length.
NucConstants nuc_constants(double eps, double norm_bound, std::int64_t bandwidth, int dim);

struct NucRegionResult {
    double nu = 0.0;
    double nu_theta = 0.0;
    bool holds = false;
    /// Witness construction: the minimizing vector of nu is split by
    /// sparsify(|u|^2) and the best part's Rayleigh ratio is compared with
    /// c^{-1/2} ||Lu|| + l (c^{-1} - 1)^{1/2}.
    double witness_ratio = 0.0;
    double witness_bound = 0.0;
    std::int64_t witness_diameter = 0;
    bool witness_holds = false;
};

struct NucReport {
    NucConstants constants;
    std::vector<NucRegionResult> regions;
    double max_slack = 0.0;  // max of nu_theta - nu
    std::size_t violations = 0;
    /// First violating region and its witness vector, if any.
    std::optional<std::size_t> counterexample;
    Vector counterexample_witness;
};

/// norm_bound <= 0 selects the Schur bound over the suite windows.
NucReport verify_nuc(const LatticeKernel& a, double eps, const std::vector<SupportRegion>& suite,
                     double norm_bound = 0.0, Exec exec = Exec::parallel);

struct ConcentrateStep {
    Point offset;          // x_i, in the coordinates of S_{i-1}
    double achieved = 0.0; // ||S_i u_i||
    double claimed = 0.0;  // nu_ambient + eps'_1 + ... + eps'_i
};

struct ConcentrateResult {
    LatticeKernel translate;  // T = S_n
    Point total_offset;
    std::vector<ConcentrateStep> steps;
    double nu_ambient = 0.0;  // proxy for nu(S)
    std::vector<double> radii;           // zeta_m = theta_1 + ... + theta_m + theta_m
    std::vector<double> achieved_bounds; // nu(T | B(zeta_m))
    std::vector<double> claimed_bounds;  // nu_ambient + eps_m + ... + eps_n
    std::size_t depth = 0;               // steps completed
    bool complete = false;
};

/// Lattice ball {|x|_inf < radius}.
std::vector<Point> open_ball(int dim, double radius);

/// Iterative concentration with eps' = reversed eps. The first witness is
/// searched on the ambient points at depth > r + 2 sum(theta) + max(theta),
/// and nu(S) is proxied by nu on that domain; witnesses are exact minimizing
/// singular vectors over sub-boxes, recentred at the lowest-lex argmax of |v|.
/// Returns depth 0 and complete = false when the ambient window has no such
/// points.
ConcentrateResult concentrate_translate(const LatticeKernel& s, const std::vector<double>& eps,
                                        const std::vector<double>& theta, const Window& ambient,
                                        Exec exec = Exec::parallel);

}  // namespace limspec
