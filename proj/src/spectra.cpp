#include "limspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "limspec/linalg.hpp"
#include "limspec/lower_norm.hpp"

namespace limspec {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double two_pi = 2.0 * std::numbers::pi;

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string matrix_hash(const Matrix& m) {
    std::ostringstream os;
    os << std::hex << fnv1a(m.data(), static_cast<std::size_t>(m.size()) * sizeof(cplx));
    return os.str();
}

struct HermitianEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd weights;  // |eigenvector entries|^2, one column per eigenvalue
};

/// Hermitian eigen-decomposition; real matrices go through the (much faster)
/// real solver.
HermitianEigen hermitian_eigen(const Matrix& m, bool vectors) {
    HermitianEigen out;
    const auto opt = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), opt);
        if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge, matrix hash " + matrix_hash(m));
        out.values = es.eigenvalues();
        if (vectors) out.weights = es.eigenvectors().cwiseAbs2();
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, opt);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge, matrix hash " + matrix_hash(m));
    out.values = es.eigenvalues();
    if (vectors) out.weights = es.eigenvectors().cwiseAbs2();
    return out;
}

bool hop_selfadjoint(const HopMap& hop) {
    for (const auto& [m, h] : hop)
        if (std::abs(hop_value(hop, -m) - std::conj(h)) > 1e-14) return false;
    return true;
}

double dist_to_intervals(double x, const std::vector<Interval>& iv) {
    double d = inf;
    for (const auto& i : iv) {
        if (x < i.lo) d = std::min(d, i.lo - x);
        else if (x > i.hi) d = std::min(d, x - i.hi);
        else return 0.0;
    }
    return d;
}

/// sup over x in [a, b] of dist(x, B) for sorted disjoint B.
double sup_dist(const Interval& a, const std::vector<Interval>& b) {
    double s = std::max(dist_to_intervals(a.lo, b), dist_to_intervals(a.hi, b));
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double mid = 0.5 * (b[i].hi + b[i + 1].lo);
        if (mid >= a.lo && mid <= a.hi) s = std::max(s, dist_to_intervals(mid, b));
    }
    return s;
}

/// Lower norms of B - lambda and (B - lambda)^* restricted to the interior of
/// a window, with the lambda-independent sparse columns built once.
class WindowEvaluator {
public:
    WindowEvaluator(const LatticeKernel& b, const Window& w) {
        const auto region = SupportRegion::interior(w, b.bandwidth());
        std::vector<Point> cols;
        for (const auto& p : region.mask)
            if (b.on_carrier(p)) cols.push_back(p);
        std::sort(cols.begin(), cols.end());
        if (cols.empty()) return;
        auto rows = expand(cols, b.bandwidth());
        if (b.carrier()) std::erase_if(rows, [&](const Point& p) { return !b.on_carrier(p); });
        std::unordered_map<Point, std::size_t, PointHash> row_index, col_index;
        for (std::size_t i = 0; i < rows.size(); ++i) row_index.emplace(rows[i], i);
        for (std::size_t j = 0; j < cols.size(); ++j) col_index.emplace(cols[j], j);

        const std::int64_t r = b.bandwidth();
        m_.resize(cols.size());
        adj_.resize(cols.size());
        diag_.resize(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            for (const Point& x : ball(cols[j], r)) {
                auto it = row_index.find(x);
                if (it == row_index.end()) continue;
                const cplx v = b(x, cols[j]);
                const cplx va = std::conj(b(cols[j], x));
                // The diagonal slot is kept even when zero so lambda can be subtracted.
                if (x == cols[j]) diag_[j] = m_[j].size();
                if (v != cplx{} || x == cols[j]) m_[j].emplace_back(it->second, v);
                if (va != cplx{} || x == cols[j]) adj_[j].emplace_back(it->second, va);
            }
            for (const Point& z : ball(cols[j], 2 * r)) {
                auto it = col_index.find(z);
                if (it != col_index.end() && it->second > j) band_ = std::max(band_, it->second - j);
            }
        }
        adj_diag_.resize(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const auto target = row_index.at(cols[j]);
            for (std::size_t k = 0; k < adj_[j].size(); ++k)
                if (adj_[j][k].first == target) adj_diag_[j] = k;
        }
    }

    bool empty() const { return m_.empty(); }

    double nu(cplx lambda, bool adjoint) const {
        if (m_.empty()) return inf;
        auto cols = adjoint ? adj_ : m_;
        const auto& d = adjoint ? adj_diag_ : diag_;
        const cplx shift = adjoint ? std::conj(lambda) : lambda;
        for (std::size_t j = 0; j < cols.size(); ++j) cols[j][d[j]].second -= shift;
        return linalg::smallest_singular_value_banded(linalg::gram_banded(cols, band_), {1e-9, 1e-7});
    }

private:
    std::vector<linalg::SparseColumn> m_, adj_;
    std::vector<std::size_t> diag_, adj_diag_;
    std::size_t band_ = 0;
};

/// Bloch data of a constant (any d) or periodic (d = 1) translation-invariant operator.
class SymbolEvaluator {
public:
    SymbolEvaluator(const HopMap& hop, std::vector<cplx> values, int dim, std::size_t samples)
        : p_(values.size()), hermitian_(hop_selfadjoint(hop)) {
        for (auto v : values) hermitian_ = hermitian_ && v.imag() == 0.0;
        if (p_ == 1) {
            const auto per_dim = std::max<std::size_t>(
                64, static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(samples), 1.0 / dim))));
            std::size_t total = 1;
            for (int i = 0; i < dim; ++i) total *= per_dim;
            scalar_.resize(total);
            for (std::size_t idx = 0; idx < total; ++idx) {
                std::array<double, max_dim> th{};
                std::size_t rest = idx;
                for (int i = 0; i < dim; ++i) {
                    th[static_cast<std::size_t>(i)] = two_pi * static_cast<double>(rest % per_dim) / static_cast<double>(per_dim);
                    rest /= per_dim;
                }
                cplx s = values[0];
                for (const auto& [m, h] : hop) {
                    double ph = 0.0;
                    for (int i = 0; i < dim; ++i) ph += th[static_cast<std::size_t>(i)] * static_cast<double>(m[i]);
                    s += h * std::polar(1.0, ph);
                }
                scalar_[idx] = s;
            }
            if (hermitian_) {
                double lo = inf, hi = -inf;
                for (auto s : scalar_) {
                    lo = std::min(lo, s.real());
                    hi = std::max(hi, s.real());
                }
                bands_.push_back({lo, hi, true, {}});
            }
            return;
        }
        if (dim != 1) throw PreconditionError("periodic symbols are supported in d = 1 only");
        blocks_.resize(samples);
        const auto p = static_cast<std::int64_t>(p_);
        std::vector<double> lo(p_, inf), hi(p_, -inf);
        for (std::size_t t = 0; t < samples; ++t) {
            const double theta = two_pi * static_cast<double>(t) / static_cast<double>(samples);
            Matrix b = Matrix::Zero(p, p);
            for (std::int64_t i = 0; i < p; ++i) {
                b(i, i) += values[static_cast<std::size_t>(i)];
                for (const auto& [m, h] : hop) {
                    const std::int64_t y = i + m[0];
                    const std::int64_t j = ((y % p) + p) % p;
                    const std::int64_t q = (y - j) / p;
                    b(i, j) += h * std::polar(1.0, static_cast<double>(q) * theta);
                }
            }
            if (hermitian_) {
                Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
                for (std::size_t k = 0; k < p_; ++k) {
                    lo[k] = std::min(lo[k], es.eigenvalues()(static_cast<Eigen::Index>(k)));
                    hi[k] = std::max(hi[k], es.eigenvalues()(static_cast<Eigen::Index>(k)));
                }
            }
            blocks_[t] = std::move(b);
        }
        if (hermitian_) {
            for (std::size_t k = 0; k < p_; ++k) bands_.push_back({lo[k], hi[k], true, {}});
            bands_ = merge_intervals(bands_, 1e-12);
        }
    }

    bool hermitian() const { return hermitian_; }
    const std::vector<Interval>& bands() const { return bands_; }
    const std::vector<cplx>& scalar_samples() const { return scalar_; }
    const std::vector<Matrix>& blocks() const { return blocks_; }

    /// Exact lower norm of B - lambda (equal for the adjoint), up to sampling.
    double nu(cplx lambda) const {
        if (hermitian_) return std::hypot(dist_to_intervals(lambda.real(), bands_), lambda.imag());
        double best = inf;
        if (p_ == 1) {
            for (auto s : scalar_) best = std::min(best, std::abs(s - lambda));
            return best;
        }
        for (const auto& b : blocks_) {
            Matrix m = b;
            m.diagonal().array() -= lambda;
            best = std::min(best, linalg::smallest_singular_value_dense(m));
        }
        return best;
    }

private:
    std::size_t p_;
    bool hermitian_;
    std::vector<cplx> scalar_;
    std::vector<Matrix> blocks_;
    std::vector<Interval> bands_;
};

struct LimitPlan {
    const LimitOperator* limit = nullptr;
    Route route = Route::window;
    bool selfadjoint = false;
    int reduced_dim = 1;  // dimension of the windows used (fiber: |S|)
    std::optional<SymbolEvaluator> symbol;
    // Fiber route.
    unsigned invariant = 0;
    HopMap hop;
    PotentialSymbol reduced_potential;
    Point reduced_shift;
    bool split_hop = false;   // every hop moves along S or along the invariant coordinates only
    std::vector<cplx> fiber_energy;  // e(k) for split hops
};

std::vector<std::int64_t> coords_of(unsigned mask, int dim) {
    std::vector<std::int64_t> out;
    for (int i = 0; i < dim; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

PotentialSymbol restrict_separable(const PotentialSymbol& v, const std::vector<std::int64_t>& keep) {
    const auto s = simplify(v);
    const auto* sep = s.as<symbol::Separable>();
    if (!sep) throw PreconditionError("fiber route needs a separable potential");
    std::vector<symbol::SeparableTerm> terms;
    for (const auto& t : sep->terms) {
        std::vector<std::vector<std::int64_t>> proj;
        for (const auto& row : t.projection) {
            std::vector<std::int64_t> r;
            for (auto c : keep) r.push_back(row[static_cast<std::size_t>(c)]);
            proj.push_back(std::move(r));
        }
        terms.push_back({std::move(proj), t.sub});
    }
    return simplify(separable(static_cast<int>(keep.size()), std::move(terms)));
}

LimitPlan plan_for(const LimitOperator& l, const UnionOptions& opts) {
    LimitPlan plan;
    plan.limit = &l;
    const auto& op = *l.op;
    const auto& tag = op.tag();
    plan.selfadjoint = tag && tag->selfadjoint && is_real(tag->potential);
    plan.reduced_dim = op.dim();
    if (!tag || op.carrier()) return plan;
    const auto cls = classify(tag->potential);
    const auto pot = simplify(tag->potential);
    if (cls == SymbolClass::constant) {
        plan.route = Route::symbol;
        plan.symbol.emplace(tag->hop, std::vector<cplx>{pot.as<symbol::Constant>()->value}, op.dim(),
                            opts.symbol_samples);
        return plan;
    }
    if (cls == SymbolClass::periodic && op.dim() == 1) {
        auto vals = pot.as<symbol::Periodic>()->values;
        const auto p = static_cast<std::int64_t>(vals.size());
        const std::int64_t r = ((tag->shift[0] % p) + p) % p;
        std::rotate(vals.begin(), vals.begin() + r, vals.end());
        plan.route = Route::symbol;
        plan.symbol.emplace(tag->hop, std::move(vals), 1, opts.symbol_samples);
        return plan;
    }
    const unsigned all = (1u << op.dim()) - 1u;
    const unsigned dep = dependence_mask(pot);
    if (op.dim() >= 2 && dep != 0u && dep != all) {
        plan.route = Route::fiber;
        plan.invariant = all & ~dep;
        const auto keep = coords_of(dep, op.dim());
        plan.reduced_dim = static_cast<int>(keep.size());
        plan.hop = tag->hop;
        plan.reduced_potential = restrict_separable(pot, keep);
        plan.reduced_shift = Point(plan.reduced_dim);
        for (std::size_t i = 0; i < keep.size(); ++i)
            plan.reduced_shift[static_cast<int>(i)] = tag->shift[static_cast<int>(keep[i])];
        plan.split_hop = true;
        for (const auto& [m, h] : tag->hop) {
            bool moves_s = false, moves_i = false;
            for (int i = 0; i < op.dim(); ++i) {
                if (m[i] == 0) continue;
                ((dep >> i) & 1u ? moves_s : moves_i) = true;
            }
            plan.split_hop = plan.split_hop && !(moves_s && moves_i);
        }
    }
    return plan;
}

/// Bloch momenta on the invariant coordinates.
std::vector<std::vector<double>> momenta(unsigned invariant, int dim, std::size_t samples) {
    const auto inv = coords_of(invariant, dim);
    std::size_t total = 1;
    for (std::size_t i = 0; i < inv.size(); ++i) total *= samples;
    std::vector<std::vector<double>> out(total, std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (auto c : inv) {
            out[idx][static_cast<std::size_t>(c)] =
                two_pi * static_cast<double>(rest % samples) / static_cast<double>(samples);
            rest /= samples;
        }
    }
    return out;
}

/// Fiber hop on the S coordinates at momentum k (phases from the invariant coordinates).
HopMap fiber_hop(const HopMap& hop, unsigned dep, int dim, const std::vector<double>& k, bool drop_invariant) {
    const auto keep = coords_of(dep, dim);
    std::map<std::vector<std::int64_t>, cplx> acc;
    for (const auto& [m, h] : hop) {
        double ph = 0.0;
        bool moves_i = false;
        for (int i = 0; i < dim; ++i)
            if (!((dep >> i) & 1u)) {
                ph += k[static_cast<std::size_t>(i)] * static_cast<double>(m[i]);
                moves_i = moves_i || m[i] != 0;
            }
        if (drop_invariant && moves_i) continue;
        std::vector<std::int64_t> ms;
        for (auto c : keep) ms.push_back(m[static_cast<int>(c)]);
        acc[ms] += h * std::polar(1.0, ph);
    }
    HopMap out;
    for (const auto& [ms, h] : acc)
        if (h != cplx{}) out.emplace_back(Point::from_vector(ms), h);
    if (out.empty()) out.emplace_back(zero_point(static_cast<int>(keep.size())), cplx{});
    return out;
}

LatticeKernel fiber_kernel(const LimitPlan& plan, const HopMap& hop, std::int64_t side) {
    BuildOptions bo{.selfadjoint = plan.selfadjoint && hop_selfadjoint(hop), .clamp_window = std::nullopt};
    if (is_unbounded(plan.reduced_potential))
        bo.clamp_window = Window::centered(zero_point(plan.reduced_dim), side + 2 * hop_radius(hop) + 2);
    return translate(build_schrodinger(hop, plan.reduced_potential, bo), plan.reduced_shift);
}

struct PerLimitValues {
    std::vector<double> nu, nu_adj;
    std::vector<char> member;
};

/// Lower norms of one limit over the grid at one window side.
PerLimitValues evaluate_limit(const LimitPlan& plan, const std::vector<cplx>& pts, const LambdaGrid& grid,
                              std::int64_t side, const UnionOptions& opts, Exec exec, std::size_t& evaluations) {
    const std::size_t n = pts.size();
    PerLimitValues out{std::vector<double>(n), std::vector<double>(n), std::vector<char>(n, 0)};
    const double resolution = grid.complex_grid ? grid.step / std::sqrt(2.0) : 0.5 * grid.step;
    const int dim = plan.limit->op->dim();

    if (plan.route == Route::symbol) {
        parallel_for(n, [&](std::size_t i) { out.nu[i] = out.nu_adj[i] = plan.symbol->nu(pts[i]); }, exec);
        const double thr = std::min(opts.tol, resolution);
        for (std::size_t i = 0; i < n; ++i) out.member[i] = out.nu[i] < thr;
        evaluations += n;
        return out;
    }

    if (plan.route == Route::fiber) {
        const unsigned dep = ((1u << dim) - 1u) & ~plan.invariant;
        const Window w = Window::centered(zero_point(plan.reduced_dim), side);
        if (plan.split_hop && plan.selfadjoint && !grid.complex_grid) {
            // B_k = B_S + e(k): precompute nu(B_S - mu) on a fine mu grid and take the
            // minimum over mu in lambda - [e_min, e_max].
            const auto ks = momenta(plan.invariant, dim, std::max<std::size_t>(opts.fiber_samples, 256));
            double emin = inf, emax = -inf;
            for (const auto& k : ks) {
                cplx e{};
                for (const auto& [m, h] : plan.hop) {
                    bool moves_i = false;
                    double ph = 0.0;
                    for (int i = 0; i < dim; ++i)
                        if (!((dep >> i) & 1u)) {
                            moves_i = moves_i || m[i] != 0;
                            ph += k[static_cast<std::size_t>(i)] * static_cast<double>(m[i]);
                        }
                    if (moves_i) e += h * std::polar(1.0, ph);
                }
                emin = std::min(emin, e.real());
                emax = std::max(emax, e.real());
            }
            const auto base = fiber_kernel(plan, fiber_hop(plan.hop, dep, dim, ks[0], true), side);
            const WindowEvaluator ev(base, w);
            const double h = 0.5 * grid.step;
            const double mu_lo = grid.re_lo - emax, mu_hi = grid.re_hi - emin;
            const auto m = static_cast<std::size_t>(std::ceil((mu_hi - mu_lo) / h)) + 1;
            std::vector<double> nus(m);
            parallel_for(m, [&](std::size_t j) { nus[j] = ev.nu(cplx(mu_lo + h * static_cast<double>(j), 0.0), false); },
                         exec);
            evaluations += m;
            for (std::size_t i = 0; i < n; ++i) {
                const double a = pts[i].real() - emax, b = pts[i].real() - emin;
                auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor((a - mu_lo) / h)));
                auto j1 = std::min(m - 1, static_cast<std::size_t>(std::ceil((b - mu_lo) / h)));
                double best = inf;
                for (std::size_t j = j0; j <= j1; ++j) {
                    const double mu = mu_lo + h * static_cast<double>(j);
                    // Lipschitz bound: nu(mu') <= nu(mu) + |mu - mu'| for mu' inside [a, b].
                    const double outside = std::max({0.0, a - mu, mu - b});
                    best = std::min(best, nus[j] + outside);
                }
                out.nu[i] = out.nu_adj[i] = best;
                out.member[i] = best < opts.tol;
            }
            return out;
        }
        const auto ks = momenta(plan.invariant, dim, opts.fiber_samples);
        std::vector<WindowEvaluator> evs;
        evs.reserve(ks.size());
        for (const auto& k : ks) evs.emplace_back(fiber_kernel(plan, fiber_hop(plan.hop, dep, dim, k, false), side), w);
        parallel_for(
            n,
            [&](std::size_t i) {
                double a = inf, b = inf;
                for (const auto& ev : evs) {
                    a = std::min(a, ev.nu(pts[i], false));
                    b = plan.selfadjoint && pts[i].imag() == 0.0 ? a : std::min(b, ev.nu(pts[i], true));
                }
                out.nu[i] = a;
                out.nu_adj[i] = b;
            },
            exec);
        evaluations += n * ks.size() * (plan.selfadjoint ? 1 : 2);
        for (std::size_t i = 0; i < n; ++i) out.member[i] = std::min(out.nu[i], out.nu_adj[i]) < opts.tol;
        return out;
    }

    const WindowEvaluator ev(*plan.limit->op, Window::centered(zero_point(dim), side));
    parallel_for(
        n,
        [&](std::size_t i) {
            out.nu[i] = ev.nu(pts[i], false);
            out.nu_adj[i] = plan.selfadjoint && pts[i].imag() == 0.0 ? out.nu[i] : ev.nu(pts[i], true);
        },
        exec);
    evaluations += n * (plan.selfadjoint ? 1 : 2);
    for (std::size_t i = 0; i < n; ++i) out.member[i] = std::min(out.nu[i], out.nu_adj[i]) < opts.tol;
    return out;
}

std::vector<const LimitOperator*> finite_limits(const std::vector<LimitOperator>& limits) {
    std::vector<const LimitOperator*> out;
    for (const auto& l : limits) {
        if (l.kind == LimitKind::no_limit)
            throw PreconditionError("limit " + l.id + " (" + l.provenance + ") has no limit; the union is undefined");
        if (l.kind == LimitKind::finite) {
            if (!l.op) throw PreconditionError("finite limit " + l.id + " carries no operator");
            out.push_back(&l);
        }
    }
    return out;
}

bool side_fits(std::int64_t side, int dim, std::size_t cap) {
    double n = 1.0;
    for (int i = 0; i < dim; ++i) n *= static_cast<double>(side);
    return n <= static_cast<double>(cap);
}

}  // namespace

std::string to_string(EstimateKind k) {
    switch (k) {
        case EstimateKind::real_intervals: return "real-intervals";
        case EstimateKind::complex_cells: return "complex-grid-cells";
        case EstimateKind::points: return "point-list";
    }
    return "?";
}

std::string to_string(Route r) {
    switch (r) {
        case Route::symbol: return "symbol";
        case Route::fiber: return "fiber";
        case Route::window: return "window";
    }
    return "?";
}

std::vector<Interval> merge_intervals(std::vector<Interval> in, double merge_tol) {
    std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (auto& i : in) {
        if (!out.empty() && i.lo - out.back().hi <= merge_tol) {
            auto& o = out.back();
            o.hi = std::max(o.hi, i.hi);
            o.exact = o.exact && i.exact;
            if (!i.provenance.empty() && o.provenance.find(i.provenance) == std::string::npos)
                o.provenance += (o.provenance.empty() ? "" : ",") + i.provenance;
        } else {
            out.push_back(std::move(i));
        }
    }
    return out;
}

double hausdorff(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return inf;
    const auto ma = merge_intervals(a, 0.0), mb = merge_intervals(b, 0.0);
    double h = 0.0;
    for (const auto& i : ma) h = std::max(h, sup_dist(i, mb));
    for (const auto& i : mb) h = std::max(h, sup_dist(i, ma));
    return h;
}

double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return inf;
    auto one_sided = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        double h = 0.0;
        for (auto p : x) {
            double d = inf;
            for (auto q : y) d = std::min(d, std::abs(p - q));
            h = std::max(h, d);
        }
        return h;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

SpectrumEstimate window_spectrum(const LatticeKernel& a, const Window& w, bool selfadjoint) {
    std::vector<Point> pts;
    for (const auto& p : w.points())
        if (a.on_carrier(p)) pts.push_back(p);
    const Matrix m = restrict_to(a, pts, pts);
    SpectrumEstimate est;
    est.kind = EstimateKind::points;
    est.provenance.push_back("window offset " + w.offset.str() + " side " + std::to_string(w.side));
    if (pts.empty()) return est;
    if (selfadjoint) {
        const auto es = hermitian_eigen(m, false);
        for (Eigen::Index i = 0; i < es.values.size(); ++i) est.points.emplace_back(es.values(i), 0.0);
        return est;
    }
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge, matrix hash " + matrix_hash(m));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) est.points.push_back(es.eigenvalues()(i));
    std::sort(est.points.begin(), est.points.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return est;
}

SpectrumEstimate symbol_spectrum(const HopMap& hop, const std::vector<cplx>& periodic_values, std::size_t theta_samples,
                                 double cell_width) {
    if (periodic_values.empty()) throw PreconditionError("symbol_spectrum: empty period");
    if (!hop.empty() && hop.front().first.dim != 1) throw PreconditionError("symbol_spectrum is one-dimensional");
    const SymbolEvaluator ev(hop, periodic_values, 1, theta_samples);
    SpectrumEstimate est;
    est.provenance.push_back("Bloch symbol, period " + std::to_string(periodic_values.size()) + ", " +
                             std::to_string(theta_samples) + " samples");
    if (ev.hermitian()) {
        est.kind = EstimateKind::real_intervals;
        est.intervals = ev.bands();
        est.tolerance = 0.0;
        return est;
    }
    est.kind = EstimateKind::complex_cells;
    est.tolerance = cell_width;
    std::set<std::pair<std::int64_t, std::int64_t>> cells;
    auto add = [&](cplx z) {
        cells.emplace(static_cast<std::int64_t>(std::floor(z.real() / cell_width)),
                      static_cast<std::int64_t>(std::floor(z.imag() / cell_width)));
    };
    for (auto s : ev.scalar_samples()) add(s);
    for (const auto& b : ev.blocks()) {
        Eigen::ComplexEigenSolver<Matrix> es(b, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) add(es.eigenvalues()(i));
    }
    for (const auto& [i, j] : cells)
        est.cells.push_back({cplx((static_cast<double>(i) + 0.5) * cell_width, (static_cast<double>(j) + 0.5) * cell_width),
                             0.5 * cell_width, true, "symbol"});
    return est;
}

LambdaGrid LambdaGrid::real(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw PreconditionError("lambda grid: need lo <= hi and step > 0");
    LambdaGrid g;
    g.re_lo = lo;
    g.re_hi = hi;
    g.step = step;
    return g;
}

LambdaGrid LambdaGrid::box(double re_lo, double re_hi, double im_lo, double im_hi, double step) {
    if (!(step > 0.0) || !(re_hi >= re_lo) || !(im_hi >= im_lo))
        throw PreconditionError("lambda grid: need lo <= hi and step > 0");
    LambdaGrid g;
    g.complex_grid = true;
    g.re_lo = re_lo;
    g.re_hi = re_hi;
    g.im_lo = im_lo;
    g.im_hi = im_hi;
    g.step = step;
    return g;
}

std::vector<cplx> LambdaGrid::points() const {
    auto count = [this](double lo, double hi) {
        return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    };
    const std::size_t nr = count(re_lo, re_hi);
    const std::size_t ni = complex_grid ? count(im_lo, im_hi) : 1;
    std::vector<cplx> out;
    out.reserve(nr * ni);
    for (std::size_t j = 0; j < ni; ++j)
        for (std::size_t i = 0; i < nr; ++i)
            out.emplace_back(re_lo + step * static_cast<double>(i),
                             complex_grid ? im_lo + step * static_cast<double>(j) : 0.0);
    return out;
}

EssentialSpectrum essential_spectrum_union(const std::vector<LimitOperator>& limits, const LambdaGrid& grid,
                                           const UnionOptions& opts, Exec exec) {
    const auto finite = finite_limits(limits);
    EssentialSpectrum res;
    const auto pts = grid.points();
    res.estimate.kind = grid.complex_grid ? EstimateKind::complex_cells : EstimateKind::real_intervals;
    res.estimate.tolerance = opts.tol;
    if (!grid.complex_grid && grid.step > opts.tol)
        res.warnings.push_back("lambda grid step exceeds the membership tolerance");

    std::vector<LimitPlan> plans;
    for (const auto* l : finite) {
        plans.push_back(plan_for(*l, opts));
        res.routes.push_back({l->id, plans.back().route, plans.back().selfadjoint});
    }
    for (const auto& l : limits)
        if (l.kind == LimitKind::infinity) res.estimate.provenance.push_back(l.id + ": infinity, contributes nothing");

    const std::size_t n = pts.size();
    std::vector<PerLimitValues> values(plans.size());
    bool needs_windows = false;
    for (std::size_t k = 0; k < plans.size(); ++k) {
        if (plans[k].route == Route::symbol) values[k] = evaluate_limit(plans[k], pts, grid, 0, opts, exec, res.evaluations);
        else needs_windows = true;
    }

    auto combine = [&]() {
        std::vector<char> member(n, 0);
        for (std::size_t k = 0; k < plans.size(); ++k)
            for (std::size_t i = 0; i < n; ++i) member[i] = member[i] || values[k].member[i];
        return member;
    };

    if (needs_windows) {
        std::optional<std::vector<char>> prev;
        res.stabilized = false;
        for (const auto side : opts.window_sides) {
            bool fits = true;
            for (const auto& p : plans)
                if (p.route != Route::symbol) fits = fits && side_fits(side, p.reduced_dim, opts.dense_cap);
            if (!fits) {
                res.warnings.push_back("window side " + std::to_string(side) + " exceeds the dense cap; doubling stopped");
                break;
            }
            for (std::size_t k = 0; k < plans.size(); ++k)
                if (plans[k].route != Route::symbol)
                    values[k] = evaluate_limit(plans[k], pts, grid, side, opts, exec, res.evaluations);
            res.window_side = side;
            auto cur = combine();
            if (prev) {
                std::size_t same = 0;
                for (std::size_t i = 0; i < n; ++i) same += cur[i] == (*prev)[i];
                const double frac = n ? static_cast<double>(same) / static_cast<double>(n) : 1.0;
                res.agreement_history.push_back(frac);
                if (frac >= opts.agreement) {
                    res.stabilized = true;
                    break;
                }
            }
            prev = std::move(cur);
        }
        if (!res.window_side) throw PreconditionError("no admissible window side for the window routes");
        if (!res.stabilized) res.warnings.push_back("membership indicator did not stabilize under window doubling");
    }

    const auto member = combine();
    res.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = res.samples[i];
        s.lambda = pts[i];
        s.nu = s.nu_adjoint = inf;
        double best = inf;
        for (std::size_t k = 0; k < plans.size(); ++k) {
            const double m = std::min(values[k].nu[i], values[k].nu_adj[i]);
            if (m < best) {
                best = m;
                s.nu = values[k].nu[i];
                s.nu_adjoint = values[k].nu_adj[i];
                s.limit_id = plans[k].limit->id;
            }
        }
        s.member = member[i];
    }

    auto contributors = [&](std::size_t i, bool& exact) {
        std::string ids;
        exact = true;
        for (std::size_t k = 0; k < plans.size(); ++k)
            if (values[k].member[i]) {
                exact = exact && plans[k].route == Route::symbol;
                if (ids.find(plans[k].limit->id) == std::string::npos) ids += (ids.empty() ? "" : ",") + plans[k].limit->id;
            }
        return ids;
    };

    if (!grid.complex_grid) {
        std::vector<Interval> iv;
        for (std::size_t i = 0; i < n; ++i) {
            if (!member[i]) continue;
            bool exact = true;
            const auto ids = contributors(i, exact);
            iv.push_back({pts[i].real(), pts[i].real(), exact, ids});
        }
        res.estimate.intervals = merge_intervals(std::move(iv), grid.step * (1.0 + 1e-9));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (!member[i]) continue;
            bool exact = true;
            const auto ids = contributors(i, exact);
            res.estimate.cells.push_back({pts[i], 0.5 * grid.step, exact, ids});
        }
    }
    for (const auto& r : res.routes) res.estimate.provenance.push_back(r.limit_id + ": " + to_string(r.route) + " route");
    return res;
}

FredholmVerdict fredholm_test(const std::vector<LimitOperator>& limits, cplx lambda, const UnionOptions& opts) {
    const auto finite = finite_limits(limits);
    FredholmVerdict v;
    v.lambda = lambda;
    std::size_t evals = 0;
    const std::vector<cplx> pts{lambda};
    const auto grid = LambdaGrid::real(lambda.real(), lambda.real(), 1.0);
    for (const auto* l : finite) {
        const auto plan = plan_for(*l, opts);
        std::int64_t side = 0;
        for (auto s : opts.window_sides)
            if (side_fits(s, plan.reduced_dim, opts.dense_cap)) side = std::max(side, s);
        if (plan.route != Route::symbol && side == 0) throw PreconditionError("no admissible window side");
        auto g = grid;
        if (lambda.imag() != 0.0) g = LambdaGrid::box(lambda.real(), lambda.real(), lambda.imag(), lambda.imag(), 1.0);
        const auto vals = evaluate_limit(plan, pts, g, side, opts, Exec::serial, evals);
        v.per_limit.push_back({l->id, vals.nu[0], vals.nu_adj[0]});
        const double m = std::min(vals.nu[0], vals.nu_adj[0]);
        if (m < opts.tol) v.fredholm = false;
        v.sup_inverse_norm = std::max(v.sup_inverse_norm, m > 0.0 ? 1.0 / m : inf);
    }
    return v;
}

SpectrumEstimate direct_essential_estimate(const LatticeKernel& a, const std::vector<Window>& far_windows,
                                           double boundary_mass, std::int64_t margin, double merge_tol, Exec exec) {
    if (far_windows.empty()) throw PreconditionError("direct_essential_estimate: no windows");
    std::vector<std::vector<Point>> pts(far_windows.size());
    std::vector<Matrix> mats(far_windows.size());
    for (std::size_t k = 0; k < far_windows.size(); ++k) {
        for (const auto& p : far_windows[k].points())
            if (a.on_carrier(p)) pts[k].push_back(p);
        mats[k] = restrict_to(a, pts[k], pts[k]);
        const double scale = std::max(1.0, mats[k].norm());
        if ((mats[k] - mats[k].adjoint()).norm() > 1e-12 * scale)
            throw PreconditionError(
                "direct_essential_estimate needs a self-adjoint operator: finite sections of non-normal operators "
                "pollute the spectrum (the truncated bilateral shift is nilpotent while the shift has the unit circle)");
    }
    std::vector<std::vector<double>> kept(far_windows.size());
    parallel_for(
        far_windows.size(),
        [&](std::size_t k) {
            if (pts[k].empty()) return;
            const auto es = hermitian_eigen(mats[k], true);
            std::vector<char> edge(pts[k].size());
            for (std::size_t i = 0; i < pts[k].size(); ++i) edge[i] = far_windows[k].depth(pts[k][i]) <= margin;
            for (Eigen::Index j = 0; j < es.values.size(); ++j) {
                double mass = 0.0;
                for (std::size_t i = 0; i < pts[k].size(); ++i)
                    if (edge[i]) mass += es.weights(static_cast<Eigen::Index>(i), j);
                if (mass < boundary_mass) kept[k].push_back(es.values(j));
            }
        },
        exec);
    SpectrumEstimate est;
    est.kind = EstimateKind::real_intervals;
    est.tolerance = merge_tol;
    std::vector<Interval> iv;
    for (std::size_t k = 0; k < far_windows.size(); ++k) {
        const auto label = "window " + far_windows[k].offset.str() + "+" + std::to_string(far_windows[k].side);
        est.provenance.push_back(label + ": kept " + std::to_string(kept[k].size()) + " of " +
                                 std::to_string(pts[k].size()));
        for (double e : kept[k]) iv.push_back({e, e, false, label});
    }
    est.intervals = merge_intervals(std::move(iv), merge_tol);
    return est;
}

}  // namespace limspec
