#include "limspec/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "limspec/linalg.hpp"

namespace limspec {

HopMap laplacian_hops(int dim) {
    HopMap hop;
    hop.emplace_back(zero_point(dim), cplx(2.0 * dim));
    for (int i = 0; i < dim; ++i) {
        Point e(dim);
        e[i] = 1;
        hop.emplace_back(e, cplx(-1.0));
        hop.emplace_back(-e, cplx(-1.0));
    }
    return hop;
}

HopMap shift_hops() { return {{Point{-1}, cplx(1.0)}}; }

std::int64_t hop_radius(const HopMap& hop) {
    std::int64_t r = 0;
    for (const auto& [m, h] : hop)
        if (h != cplx{}) r = std::max(r, norm_inf(m));
    return r;
}

cplx hop_value(const HopMap& hop, const Point& m) {
    cplx s{};
    for (const auto& [k, h] : hop)
        if (k == m) s += h;
    return s;
}

LatticeKernel::LatticeKernel(int dim, std::int64_t bandwidth, KernelRule rule, double bound,
                             std::shared_ptr<const SymbolTag> tag, Carrier carrier)
    : dim_(dim), bandwidth_(bandwidth), rule_(std::move(rule)), bound_(bound), tag_(std::move(tag)),
      carrier_(std::move(carrier)) {
    if (dim_ < 1 || dim_ > max_dim) throw PreconditionError("kernel dimension must be in [1, 3]");
    if (bandwidth_ < 0) throw PreconditionError("bandwidth must be nonnegative");
}

namespace {

cplx clamp_modulus(cplx v, double cap) {
    const double a = std::abs(v);
    return a > cap ? v * (cap / a) : v;
}

}  // namespace

LatticeKernel build_schrodinger(const HopMap& hop, const PotentialSymbol& v, const BuildOptions& opts) {
    const int dim = v.dim;
    for (const auto& [m, h] : hop)
        if (m.dim != dim) throw PreconditionError("hop offsets and potential differ in dimension");
    if (opts.selfadjoint) {
        for (const auto& [m, h] : hop)
            if (std::abs(hop_value(hop, -m) - std::conj(hop_value(hop, m))) > 1e-14)
                throw PreconditionError("self-adjoint flag set but hop(-m) != conj(hop(m)) at m = " + m.str());
    }

    const bool wall = v.is<symbol::Wall>();
    std::optional<double> clamp;
    if (!wall && is_unbounded(v)) {
        if (!opts.clamp_window)
            throw PreconditionError("unbounded potential " + describe(v) + " requires a clamp window");
        clamp = sup_abs_on(v, *opts.clamp_window) + 1.0;
    }

    const double sup_v = wall ? 0.0 : (clamp ? *clamp : sup_abs(v));
    double off_diag = 0.0;
    for (const auto& [m, h] : hop)
        if (!(m == zero_point(dim))) off_diag = std::max(off_diag, std::abs(hop_value(hop, m)));
    const double bound = std::max(off_diag, std::abs(hop_value(hop, zero_point(dim))) + sup_v);

    auto tag = std::make_shared<SymbolTag>(SymbolTag{hop, v, zero_point(dim), opts.selfadjoint, clamp});
    KernelRule rule = [hop, v, clamp](const Point& x, const Point& y) {
        cplx s = hop_value(hop, y - x);
        if (x == y) {
            cplx d = evaluate(v, x);
            if (clamp) d = clamp_modulus(d, *clamp);
            s += d;
        }
        return s;
    };
    Carrier carrier;
    if (wall) carrier = [](const Point& x) { return x[0] >= 0; };
    return LatticeKernel(dim, hop_radius(hop), std::move(rule), bound, std::move(tag), std::move(carrier));
}

LatticeKernel identity_kernel(int dim) {
    return build_schrodinger({{zero_point(dim), cplx(1.0)}}, constant_potential(0.0, dim), {.selfadjoint = true, .clamp_window = std::nullopt});
}

LatticeKernel zero_kernel(int dim) { return build_schrodinger({}, constant_potential(0.0, dim), {.selfadjoint = true, .clamp_window = std::nullopt}); }

LatticeKernel matrix_unit(const Point& p, const Point& q) {
    if (p.dim != q.dim) throw PreconditionError("matrix_unit points differ in dimension");
    return LatticeKernel(
        p.dim, norm_inf(p - q), [p, q](const Point& x, const Point& y) { return x == p && y == q ? cplx(1.0) : cplx{}; },
        1.0);
}

LatticeKernel translate(const LatticeKernel& a, const Point& offset) {
    if (offset.dim != a.dim()) throw PreconditionError("translation offset has the wrong dimension");
    const KernelRule& inner = a.rule();
    KernelRule rule = [inner, offset](const Point& x, const Point& y) { return inner(x + offset, y + offset); };
    std::shared_ptr<const SymbolTag> tag;
    if (a.tag()) {
        auto t = std::make_shared<SymbolTag>(*a.tag());
        t->shift = t->shift + offset;
        tag = std::move(t);
    }
    Carrier carrier;
    if (a.carrier()) carrier = [c = a.carrier(), offset](const Point& x) { return c(x + offset); };
    return LatticeKernel(a.dim(), a.bandwidth(), std::move(rule), a.bound(), std::move(tag), std::move(carrier));
}

LatticeKernel translate_clamped(const LatticeKernel& a, const Point& offset, const Window& window) {
    if (!a.tag() || !a.tag()->clamp) return translate(a, offset);
    const auto& t = *a.tag();
    const Point total = t.shift + offset;
    const Window target(window.offset + total, window.side);
    const LatticeKernel base =
        build_schrodinger(t.hop, t.potential, {.selfadjoint = t.selfadjoint, .clamp_window = target});
    return translate(base, total);
}

LatticeKernel adjoint(const LatticeKernel& a) {
    const KernelRule& inner = a.rule();
    KernelRule rule = [inner](const Point& x, const Point& y) { return std::conj(inner(y, x)); };
    std::shared_ptr<const SymbolTag> tag;
    if (a.tag() && a.tag()->selfadjoint && is_real(a.tag()->potential)) tag = a.tag();
    return LatticeKernel(a.dim(), a.bandwidth(), std::move(rule), a.bound(), std::move(tag), a.carrier());
}

LatticeKernel shifted(const LatticeKernel& a, cplx lambda) {
    const KernelRule& inner = a.rule();
    KernelRule rule = [inner, lambda](const Point& x, const Point& y) {
        return x == y ? inner(x, y) - lambda : inner(x, y);
    };
    std::shared_ptr<const SymbolTag> tag;
    if (a.tag()) {
        auto t = std::make_shared<SymbolTag>(*a.tag());
        t->hop.emplace_back(zero_point(a.dim()), -lambda);
        t->selfadjoint = t->selfadjoint && lambda.imag() == 0.0;
        tag = std::move(t);
    }
    return LatticeKernel(a.dim(), a.bandwidth(), std::move(rule), a.bound() + std::abs(lambda), std::move(tag),
                         a.carrier());
}

LatticeKernel compose(const LatticeKernel& a, const LatticeKernel& b) {
    if (a.dim() != b.dim()) throw PreconditionError("compose: dimensions differ");
    const std::int64_t r = a.bandwidth() + b.bandwidth();
    KernelRule rule = [a, b](const Point& x, const Point& y) {
        cplx s{};
        for (const Point& z : ball(x, a.bandwidth()))
            if (norm_inf(z - y) <= b.bandwidth()) s += a(x, z) * b(z, y);
        return s;
    };
    const std::int64_t overlap = 2 * std::min(a.bandwidth(), b.bandwidth()) + 1;
    const double bound = a.bound() * b.bound() * std::pow(static_cast<double>(overlap), a.dim());
    Carrier carrier;
    if (a.carrier() || b.carrier())
        carrier = [a, b](const Point& x) { return a.on_carrier(x) && b.on_carrier(x); };
    return LatticeKernel(a.dim(), r, std::move(rule), bound, nullptr, std::move(carrier));
}

Matrix compress(const LatticeKernel& a, const Window& w, std::size_t cap) {
    const std::size_t n = w.size();
    if (n > cap) throw CapacityError(n, cap);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const Point y = w.point_at(j);
        for (const Point& x : ball(y, a.bandwidth()))
            if (w.contains(x)) m(static_cast<Eigen::Index>(w.index_of(x)), static_cast<Eigen::Index>(j)) = a(x, y);
    }
    return m;
}

Matrix restrict_to(const LatticeKernel& a, const std::vector<Point>& rows, const std::vector<Point>& cols,
                   std::size_t cap) {
    if (rows.size() > cap) throw CapacityError(rows.size(), cap);
    std::unordered_map<Point, std::size_t, PointHash> row_index;
    row_index.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) row_index.emplace(rows[i], i);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const Point& x : ball(cols[j], a.bandwidth())) {
            auto it = row_index.find(x);
            if (it != row_index.end())
                m(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(j)) = a(x, cols[j]);
        }
    return m;
}

double fejer_weight(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

std::int64_t mollified_bandwidth(double eps) {
    if (!(eps > 0.0)) throw PreconditionError("mollifier eps must be positive");
    // Largest k with eps * k < 1, i.e. ceil(1/eps) - 1, robust to rounding of 1/eps.
    auto k = static_cast<std::int64_t>(std::floor(1.0 / eps));
    while (k > 0 && eps * static_cast<double>(k) >= 1.0) --k;
    while (eps * static_cast<double>(k + 1) < 1.0) ++k;
    return k;
}

LatticeKernel band_mollify(const LatticeKernel& a, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("mollifier eps must lie in (0, 1]");
    const std::int64_t r = std::min(a.bandwidth(), mollified_bandwidth(eps));
    const KernelRule& inner = a.rule();
    KernelRule rule = [inner, eps](const Point& x, const Point& y) {
        const double wgt = fejer_weight(eps * static_cast<double>(norm_inf(x - y)));
        return wgt == 0.0 ? cplx{} : inner(x, y) * wgt;
    };
    std::shared_ptr<const SymbolTag> tag;
    if (a.tag()) {
        auto t = std::make_shared<SymbolTag>(*a.tag());
        HopMap hop;
        for (const auto& [m, h] : t->hop) {
            const double wgt = fejer_weight(eps * static_cast<double>(norm_inf(m)));
            if (wgt > 0.0) hop.emplace_back(m, h * wgt);
        }
        t->hop = std::move(hop);
        tag = std::move(t);
    }
    return LatticeKernel(a.dim(), r, std::move(rule), a.bound(), std::move(tag), a.carrier());
}

std::vector<double> compactness_profile(const LatticeKernel& a, const std::vector<std::int64_t>& radii,
                                        const Window& w) {
    if (radii.empty()) return {};
    const std::int64_t rmax = *std::max_element(radii.begin(), radii.end());
    const std::int64_t reach = rmax + 1 + a.bandwidth();
    for (int i = 0; i < w.dim(); ++i) {
        if (w.offset[i] > -reach || w.offset[i] + w.side - 1 < reach)
            throw WindowTooSmall(w.side, 2 * reach + 1);
    }
    std::vector<double> profile(radii.size(), 0.0);
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const std::int64_t radius = radii[k];
        for (const Point& x : ball(zero_point(a.dim()), radius)) {
            if (norm_inf(x) != radius) continue;
            const auto cols = ball(x, 1);
            const auto rows = expand(cols, a.bandwidth());
            profile[k] = std::max(profile[k], linalg::largest_singular_value(restrict_to(a, rows, cols)));
        }
    }
    return profile;
}

LocalProbe LocalProbe::exponential(int dim, std::int64_t radius, double base) {
    return {[base](const Point& x) { return std::pow(base, -static_cast<double>(norm_inf(x))); },
            Window::centered(zero_point(dim), 2 * radius + 1)};
}

double local_distance(const LatticeKernel& a, const LatticeKernel& b, const LocalProbe& probe) {
    if (a.dim() != b.dim()) throw PreconditionError("local_distance: dimensions differ");
    Matrix m = compress(a, probe.window) - compress(b, probe.window);
    for (std::size_t j = 0; j < probe.window.size(); ++j)
        m.col(static_cast<Eigen::Index>(j)) *= probe.weight(probe.window.point_at(j));
    return linalg::largest_singular_value(m);
}

double window_norm(const LatticeKernel& a, const Window& w) {
    return linalg::largest_singular_value(compress(a, w));
}

double schur_norm_bound(const LatticeKernel& a, const Window& w) {
    double row_max = 0.0;
    double col_max = 0.0;
    for (const Point& x : w.points()) {
        double row = 0.0;
        double col = 0.0;
        for (const Point& y : ball(x, a.bandwidth())) {
            row += std::abs(a(x, y));
            col += std::abs(a(y, x));
        }
        row_max = std::max(row_max, row);
        col_max = std::max(col_max, col);
    }
    return std::sqrt(row_max * col_max);
}

double sampled_max_abs(const LatticeKernel& a, const Window& w) {
    double best = 0.0;
    for (const Point& x : w.points())
        for (const Point& y : ball(x, a.bandwidth() + 1)) best = std::max(best, std::abs(a(x, y)));
    return best;
}

}  // namespace limspec
