#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "limspec/kernel.hpp"
#include "limspec/parallel.hpp"
#include "limspec/potential.hpp"
#include "limspec/resolvent.hpp"

namespace limspec {

namespace seq {

struct Explicit {
    std::vector<Point> points;
};

/// Lattice roundings of r * alpha / |alpha|_2.
struct Ray {
    std::vector<double> alpha;
    std::vector<double> radii;
};

/// x_n = n^2, or n^2 + floor(n / 2) with `midpoints` (centres of the zero plateaus).
struct PlateauCenters {
    std::vector<std::int64_t> n;
    bool midpoints = false;
};

/// ModulatedPower sequences with the localized potential tending to the
/// family member labelled c. Writing xi_m = m^{1/theta} for the zeros of
/// omega(x^theta):
///  - critical exponent: v(xi_m + s) -> lambda |theta s|^mu, so x = xi_m + c/theta
///    (kept only when it is within 0.05 of an integer) yields the well
///    lambda |theta q + c|^mu;
///  - subcritical: v is slowly varying away from xi_m; x = round of the first
///    level-set point v = c above xi_m yields the constant c;
///  - supercritical: x = round(xi_m).
/// m runs through round(m_start * growth^k), k = 0..count-1.
struct FractionalTarget {
    double c = 0.0;
    std::size_t count = 8;
    double m_start = 16.0;
    double growth = 2.0;
};

}  // namespace seq

struct DirectionSequence {
    using Variant = std::variant<seq::Explicit, seq::Ray, seq::PlateauCenters, seq::FractionalTarget>;
    Variant v;
    int dim = 1;
    std::string label;
};

DirectionSequence explicit_sequence(std::vector<Point> pts, std::string label = {});
DirectionSequence ray_sequence(std::vector<double> alpha, std::vector<double> radii, std::string label = {});
DirectionSequence plateau_centers(std::vector<std::int64_t> n, bool midpoints = false, std::string label = {});
DirectionSequence fractional_target(double c, std::size_t count = 8, double m_start = 16.0, double growth = 2.0,
                                    std::string label = {});

/// Lattice points of the sequence. FractionalTarget needs the ModulatedPower
/// symbol. Throws PreconditionError unless norms strictly increase.
std::vector<Point> realize(const DirectionSequence& s, const PotentialSymbol* v = nullptr);

/// -1, 0 (mixed / undefined) or +1: the end of Z a 1-D sequence tends to.
int sequence_end(const DirectionSequence& s, const PotentialSymbol* v = nullptr);

enum class LimitKind { finite, infinity, no_limit };
std::string to_string(LimitKind k);

struct SymbolicLimit {
    LimitKind kind = LimitKind::no_limit;
    std::optional<PotentialSymbol> symbol;
    std::string reason;
};

SymbolicLimit symbolic_limit(const PotentialSymbol& v, const DirectionSequence& s);

enum class LimitMode { symbolic, operator_norm, resolvent };
std::string to_string(LimitMode m);

struct CauchyEntry {
    std::size_t n = 0;
    Point point;
    double gap = 0.0;  // distance between translates n and n + 1

    friend bool operator==(const CauchyEntry&, const CauchyEntry&) = default;
};

struct LimitOperator {
    LimitKind kind = LimitKind::no_limit;
    std::optional<LatticeKernel> op;
    std::optional<PotentialSymbol> symbol;  // limit potential, when known
    HopMap hop;
    std::string id;
    std::string provenance;
    LimitMode mode = LimitMode::symbolic;
    std::vector<CauchyEntry> certificate;
    std::string reason;
    /// Distance between the numeric and the symbolic limit, when both exist.
    std::optional<double> symbolic_distance;
    bool agrees_with_symbolic = true;
    /// NoLimit only: the last min_divergent gaps are all >= tol, their maximum
    /// is at least half the maximum over the first half of the gaps, and the
    /// weak-limit-zero alternative is excluded.
    bool divergence_certified = false;
    /// Resolvent mode: windowed resolvent norms along the sequence.
    std::vector<double> resolvent_norms;
    std::optional<std::size_t> infinity_from;
};

struct NumericLimitOptions {
    double tol = 1e-3;
    double agreement_tol = 1e-2;
    double infinity_tol = 0.1;
    std::int64_t resolvent_margin = 20;
    /// Overrides the resolvent sample point; defaults to -1 below semibounded
    /// self-adjoint operators and i otherwise.
    std::optional<cplx> z0;
    std::size_t min_decreasing = 3;
    std::size_t min_divergent = 5;
};

/// Limit operator from a symbolic potential limit: hop(y - x) + v(x).
LatticeKernel limit_kernel(const HopMap& hop, const PotentialSymbol& limit, bool selfadjoint);

/// Resolvent sample point used in resolvent mode.
cplx resolvent_point(const LatticeKernel& a, const NumericLimitOptions& opts = {});

/// Translates tau_{x_n}(A) compared on the probe. Unbounded symbols are
/// compared through windowed resolvents (and may be detected as infinity).
LimitOperator numeric_limit(const LatticeKernel& a, const DirectionSequence& s, const LocalProbe& probe,
                            const NumericLimitOptions& opts = {});

struct DirectionalLimit {
    LimitOperator limit;
    LimitOperator doubled;            // same direction, radii doubled
    double representative_gap = 0.0;  // local distance between the two
    bool independent = false;
};

/// Separable symbols along the ray alpha: terms with P alpha != 0 are replaced
/// by their own limits, terms with P alpha = 0 are kept.
DirectionalLimit directional_limit(const LatticeKernel& a, const std::vector<double>& alpha,
                                   const std::vector<double>& radii, const LocalProbe& probe,
                                   const NumericLimitOptions& opts = {});

/// Limits along every sequence (in parallel), then deduplicated in input order
/// by local distance < tol. NoLimit entries are kept (with provenance).
std::vector<LimitOperator> operator_spectrum_sample(const LatticeKernel& a, const std::vector<DirectionSequence>& seqs,
                                                    const LocalProbe& probe, const NumericLimitOptions& opts = {},
                                                    Exec exec = Exec::parallel);

/// Order-preserving deduplication of finite limits; infinity entries collapse
/// to one, NoLimit entries are kept.
std::vector<LimitOperator> dedupe_limits(const std::vector<LimitOperator>& limits, const LocalProbe& probe, double tol);

}  // namespace limspec
