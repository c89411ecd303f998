#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "limspec/lattice.hpp"
#include "limspec/potential.hpp"

namespace limspec {

inline constexpr std::size_t default_dense_cap = 4096;

/// Finite-support hopping coefficients m -> h(m); the kernel is h(y - x).
using HopMap = std::vector<std::pair<Point, cplx>>;

HopMap laplacian_hops(int dim);
/// (S u)(x) = u(x - 1): kernel(x, x - 1) = 1, a single subdiagonal on windows.
HopMap shift_hops();
std::int64_t hop_radius(const HopMap& hop);
cplx hop_value(const HopMap& hop, const Point& m);

/// Records how a kernel was generated so limits and spectra can be computed
/// symbolically. The kernel equals build_schrodinger(hop, potential) translated
/// by `shift`.
struct SymbolTag {
    HopMap hop;
    PotentialSymbol potential;
    Point shift;
    bool selfadjoint = false;
    std::optional<double> clamp;
};

using KernelRule = std::function<cplx(const Point&, const Point&)>;
using Carrier = std::function<bool(const Point&)>;

/// Controlled operator on l2(Z^d): kernel(x, y) = 0 whenever |x - y|_inf > bandwidth.
/// An optional carrier restricts the operator to a subspace l2(C); outside the
/// carrier the operator is "infinite" (its resolvent vanishes there) and the
/// kernel reads zero.
class LatticeKernel {
public:
    LatticeKernel(int dim, std::int64_t bandwidth, KernelRule rule, double bound,
                  std::shared_ptr<const SymbolTag> tag = nullptr, Carrier carrier = {});

    int dim() const { return dim_; }
    std::int64_t bandwidth() const { return bandwidth_; }
    double bound() const { return bound_; }
    const std::shared_ptr<const SymbolTag>& tag() const { return tag_; }
    const Carrier& carrier() const { return carrier_; }
    bool on_carrier(const Point& x) const { return !carrier_ || carrier_(x); }

    cplx operator()(const Point& x, const Point& y) const {
        if (norm_inf(x - y) > bandwidth_) return {};
        if (carrier_ && (!carrier_(x) || !carrier_(y))) return {};
        return rule_(x, y);
    }

    const KernelRule& rule() const { return rule_; }

private:
    int dim_;
    std::int64_t bandwidth_;
    KernelRule rule_;
    double bound_;
    std::shared_ptr<const SymbolTag> tag_;
    Carrier carrier_;
};

struct BuildOptions {
    bool selfadjoint = false;
    /// Required for unbounded symbols: values are clamped in modulus to
    /// (sup over the window) + 1, so the window itself is unaffected.
    std::optional<Window> clamp_window;
};

/// kernel(x, y) = hop(y - x) + [x == y] v(x).
LatticeKernel build_schrodinger(const HopMap& hop, const PotentialSymbol& v, const BuildOptions& opts = {});

LatticeKernel identity_kernel(int dim);
LatticeKernel zero_kernel(int dim);
/// Rank-one kernel e_p (x) e_q.
LatticeKernel matrix_unit(const Point& p, const Point& q);

/// kernel'(x, y) = kernel(x + a, y + a).
LatticeKernel translate(const LatticeKernel& a, const Point& offset);
/// translate(A, offset), with a window clamp (if A carries one) recomputed so
/// that values on `window` (translated coordinates) are exact.
LatticeKernel translate_clamped(const LatticeKernel& a, const Point& offset, const Window& window);
/// kernel'(x, y) = conj(kernel(y, x)).
LatticeKernel adjoint(const LatticeKernel& a);
/// A - lambda * I (on the carrier).
LatticeKernel shifted(const LatticeKernel& a, cplx lambda);
/// Operator product A B; bandwidth r_A + r_B.
LatticeKernel compose(const LatticeKernel& a, const LatticeKernel& b);

/// Dense compression to the window (Dirichlet truncation), lexicographic order.
Matrix compress(const LatticeKernel& a, const Window& w, std::size_t cap = default_dense_cap);
/// Dense block with the given row and column point lists.
Matrix restrict_to(const LatticeKernel& a, const std::vector<Point>& rows, const std::vector<Point>& cols,
                   std::size_t cap = default_dense_cap);

/// Triangular weight (1 - |t|)_+.
double fejer_weight(double t);
/// Largest hop kept by band_mollify at this eps: ceil(1/eps) - 1.
std::int64_t mollified_bandwidth(double eps);
/// kernel'(x, y) = kernel(x, y) * fejer_weight(eps |x - y|_inf), 0 < eps <= 1.
LatticeKernel band_mollify(const LatticeKernel& a, double eps);

/// Entry R: max over |x|_inf = R of the norm of A restricted to the columns of
/// the closed unit ball at x.
std::vector<double> compactness_profile(const LatticeKernel& a, const std::vector<std::int64_t>& radii,
                                        const Window& w);

/// Weighted window carrying the local-norm seminorm ||A theta(q)||.
struct LocalProbe {
    std::function<double(const Point&)> weight;
    Window window;

    /// weight(x) = base^{-|x|_inf} on the centred window of the given radius.
    static LocalProbe exponential(int dim, std::int64_t radius, double base = 2.0);
};

/// Largest singular value of (A - B) diag(weight) compressed to the probe window.
double local_distance(const LatticeKernel& a, const LatticeKernel& b, const LocalProbe& probe);

/// Largest singular value of the window compression.
double window_norm(const LatticeKernel& a, const Window& w);

/// Schur-test upper bound for ||A|| from kernel entries sampled on the window.
double schur_norm_bound(const LatticeKernel& a, const Window& w);

/// Max |kernel(x, y)| over sampled pairs of the window; used by invariant tests.
double sampled_max_abs(const LatticeKernel& a, const Window& w);

}  // namespace limspec
