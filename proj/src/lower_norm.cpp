#include "limspec/lower_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "limspec/linalg.hpp"

namespace limspec {

namespace {

constexpr std::size_t dense_auto_limit = 256;
constexpr std::size_t dense_row_cap = 1u << 14;
constexpr double inf = std::numeric_limits<double>::infinity();

std::vector<Point> carrier_columns(const LatticeKernel& a, const std::vector<Point>& cols) {
    std::vector<Point> out;
    out.reserve(cols.size());
    for (const auto& p : cols)
        if (a.on_carrier(p)) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Point> carrier_rows(const LatticeKernel& a, const std::vector<Point>& cols) {
    auto rows = expand(cols, a.bandwidth());
    if (a.carrier()) std::erase_if(rows, [&](const Point& p) { return !a.on_carrier(p); });
    return rows;
}

double banded_lower_norm(const LatticeKernel& a, const std::vector<Point>& cols) {
    const auto rows = carrier_rows(a, cols);
    std::unordered_map<Point, std::size_t, PointHash> row_index, col_index;
    row_index.reserve(rows.size());
    col_index.reserve(cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) row_index.emplace(rows[i], i);
    for (std::size_t j = 0; j < cols.size(); ++j) col_index.emplace(cols[j], j);

    const std::int64_t r = a.bandwidth();
    std::vector<linalg::SparseColumn> sparse(cols.size());
    std::size_t gram_band = 0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (const Point& x : ball(cols[j], r)) {
            auto it = row_index.find(x);
            if (it == row_index.end()) continue;
            const cplx v = a(x, cols[j]);
            if (v != cplx{}) sparse[j].emplace_back(it->second, v);
        }
        std::sort(sparse[j].begin(), sparse[j].end(),
                  [](const auto& l, const auto& rr) { return l.first < rr.first; });
        // Columns sharing a row lie within 2r of each other.
        for (const Point& z : ball(cols[j], 2 * r)) {
            auto it = col_index.find(z);
            if (it != col_index.end() && it->second > j) gram_band = std::max(gram_band, it->second - j);
        }
    }
    return linalg::smallest_singular_value_banded(linalg::gram_banded(sparse, gram_band));
}

}  // namespace

SupportRegion SupportRegion::interior(const Window& w, std::int64_t margin) {
    SupportRegion reg{w, {}};
    for (const auto& p : w.points())
        if (w.depth(p) > margin) reg.mask.push_back(p);
    if (reg.mask.empty()) throw WindowTooSmall(w.side, 2 * margin + 1);
    return reg;
}

void SupportRegion::check_margin(std::int64_t bandwidth) const {
    if (mask.empty()) throw PreconditionError("support region mask is empty");
    std::int64_t have = std::numeric_limits<std::int64_t>::max();
    for (const auto& p : mask) have = std::min(have, window.depth(p) - 1);
    if (have < bandwidth) throw MarginError(std::max<std::int64_t>(have, 0), bandwidth);
}

double lower_norm(const LatticeKernel& a, const std::vector<Point>& cols_in, NuMethod method) {
    const auto cols = carrier_columns(a, cols_in);
    if (cols.empty()) return inf;
    if (method == NuMethod::automatic) method = cols.size() <= dense_auto_limit ? NuMethod::dense : NuMethod::banded;
    if (method == NuMethod::banded) return banded_lower_norm(a, cols);
    return linalg::smallest_singular_value_dense(restrict_to(a, carrier_rows(a, cols), cols, dense_row_cap));
}

LowerNormResult lower_norm_with_witness(const LatticeKernel& a, const std::vector<Point>& cols_in,
                                        std::vector<Point>* cols_used) {
    auto cols = carrier_columns(a, cols_in);
    if (cols_used) *cols_used = cols;
    if (cols.empty()) return {inf, Vector()};
    const Matrix m = restrict_to(a, carrier_rows(a, cols), cols, dense_row_cap);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
    const auto k = svd.singularValues().size() - 1;
    return {svd.singularValues()(k), svd.matrixV().col(k)};
}

double nu_local(const LatticeKernel& a, const SupportRegion& region, NuMethod method) {
    region.check_margin(a.bandwidth());
    return lower_norm(a, region.mask, method);
}

std::int64_t box_side_below(double theta) {
    if (!(theta > 0.0)) throw PreconditionError("theta must be positive");
    if (theta > 1e15) return std::numeric_limits<std::int64_t>::max() / 4;
    return static_cast<std::int64_t>(std::ceil(theta + 1.0)) - 1;
}

NuThetaResult nu_theta_detail(const LatticeKernel& a, const std::vector<Point>& omega_in, double theta,
                              bool want_witness, NuMethod method, Exec exec) {
    auto omega = omega_in;
    std::sort(omega.begin(), omega.end());
    omega.erase(std::unique(omega.begin(), omega.end()), omega.end());
    if (omega.empty()) throw PreconditionError("nu_theta: empty region");
    const int d = omega.front().dim;
    const std::int64_t s = box_side_below(theta);

    Point lo = omega.front(), hi = omega.front();
    for (const auto& p : omega)
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    // Boxes sticking out of the bounding box are dominated by boxes inside it.
    std::array<std::int64_t, max_dim> count{};
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) {
        count[static_cast<std::size_t>(i)] = std::max<std::int64_t>(1, hi[i] - lo[i] - s + 2);
        total *= static_cast<std::size_t>(count[static_cast<std::size_t>(i)]);
    }
    auto corner_at = [&](std::size_t idx) {
        Point c(d);
        for (int i = d - 1; i >= 0; --i) {
            const auto n = static_cast<std::size_t>(count[static_cast<std::size_t>(i)]);
            c[i] = lo[i] + static_cast<std::int64_t>(idx % n);
            idx /= n;
        }
        return c;
    };
    auto members = [&](const Point& corner) {
        std::vector<Point> sub;
        for (const auto& p : omega) {
            bool in = true;
            for (int i = 0; i < d && in; ++i) in = p[i] >= corner[i] && p[i] - corner[i] < s;
            if (in) sub.push_back(p);
        }
        return sub;
    };

    std::vector<double> values(total, inf);
    parallel_for(
        total,
        [&](std::size_t k) {
            const auto sub = members(corner_at(k));
            if (!sub.empty()) values[k] = lower_norm(a, sub, method);
        },
        exec);

    // Corners are enumerated in lexicographic order, so the first minimum wins ties.
    std::size_t best = 0;
    for (std::size_t k = 1; k < total; ++k)
        if (values[k] < values[best]) best = k;

    NuThetaResult res;
    res.value = values[best];
    res.corner = corner_at(best);
    res.support = members(res.corner);
    res.boxes = total;
    if (want_witness) {
        std::vector<Point> used;
        auto w = lower_norm_with_witness(a, res.support, &used);
        res.support = used;
        res.witness = w.witness;
        if (method == NuMethod::dense) res.value = w.value;
    }
    return res;
}

double nu_theta(const LatticeKernel& a, const SupportRegion& region, double theta, NuMethod method, Exec exec) {
    region.check_margin(a.bandwidth());
    return nu_theta_detail(a, region.mask, theta, false, method, exec).value;
}

// ---------------------------------------------------------------------------
// Sparsification
// ---------------------------------------------------------------------------

namespace {

std::int64_t block_length_from(std::int64_t gap, double one_minus_root) {
    if (!(one_minus_root > 0.0)) throw PreconditionError("sparsify target must lie in (0, 1)");
    const double q = static_cast<double>(gap) / one_minus_root;
    return std::max<std::int64_t>(gap + 1, static_cast<std::int64_t>(std::ceil(q * (1.0 - 1e-12))));
}

std::int64_t integer_gap(double gap) {
    if (!(gap >= 0.0)) throw PreconditionError("sparsify gap must be nonnegative");
    return static_cast<std::int64_t>(std::ceil(gap - 1e-12));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::int64_t sparsify_block_length(double gap, double target, int dim) {
    if (!(target > 0.0 && target < 1.0)) throw PreconditionError("sparsify target must lie in (0, 1)");
    return block_length_from(integer_gap(gap), -std::expm1(std::log(target) / dim));
}

SparseDecomposition sparsify(const std::vector<WeightedPoint>& weights, double gap, double target) {
    if (weights.empty()) throw PreconditionError("sparsify: no weights");
    const int d = weights.front().point.dim;
    const std::int64_t rgap = integer_gap(gap);
    const std::int64_t D = sparsify_block_length(gap, target, d);
    const std::int64_t keep = D - rgap;

    long double total = 0.0L;
    std::vector<std::size_t> alive;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].weight < 0.0 || !std::isfinite(weights[k].weight))
            throw PreconditionError("sparsify: weights must be finite and nonnegative");
        total += weights[k].weight;
        if (weights[k].weight > 0.0) alive.push_back(k);
    }
    if (!(total > 0.0L)) throw PreconditionError("sparsify: total weight must be positive");

    SparseDecomposition dec;
    dec.gap = gap;
    dec.block_length = D;
    dec.offsets.assign(static_cast<std::size_t>(d), 0);

    for (int i = 0; i < d; ++i) {
        // Weight per residue class, then a cyclic sliding window of length `keep`.
        std::map<std::int64_t, long double> residue;
        for (auto k : alive) {
            const std::int64_t x = weights[k].point[i];
            residue[x - floor_div(x, D) * D] += weights[k].weight;
        }
        // kept(off) = sum of residue weights rho with (rho - off) mod D < keep.
        auto kept = [&](std::int64_t off) {
            long double s = 0.0L;
            for (const auto& [rho, w] : residue) {
                std::int64_t pos = rho - off;
                if (pos < 0) pos += D;
                if (pos < keep) s += w;
            }
            return s;
        };
        // kept() is piecewise constant in the offset; every piece starts at 0 or
        // where a residue enters (rho - keep + 1) or leaves (rho + 1) the window.
        std::vector<std::int64_t> candidates{0};
        for (const auto& [rho, w] : residue) {
            candidates.push_back((rho + 1) % D);
            candidates.push_back(((rho - keep + 1) % D + D) % D);
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        std::int64_t best_off = 0;
        long double best = -1.0L;
        for (auto off : candidates) {
            const long double v = kept(off);
            if (v > best) {
                best = v;
                best_off = off;
            }
        }
        dec.offsets[static_cast<std::size_t>(i)] = best_off;
        std::erase_if(alive, [&](std::size_t k) {
            const std::int64_t x = weights[k].point[i] - best_off;
            return x - floor_div(x, D) * D >= keep;
        });
    }

    long double kept_w = 0.0L;
    std::map<std::vector<std::int64_t>, std::vector<Point>> groups;
    for (auto k : alive) {
        kept_w += weights[k].weight;
        std::vector<std::int64_t> key(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            key[static_cast<std::size_t>(i)] = floor_div(weights[k].point[i] - dec.offsets[static_cast<std::size_t>(i)], D);
        groups[key].push_back(weights[k].point);
    }
    for (auto& [key, pts] : groups) {
        std::sort(pts.begin(), pts.end());
        dec.max_diameter = std::max(dec.max_diameter, diameter(pts));
        dec.parts.push_back(std::move(pts));
    }
    dec.kept_fraction = static_cast<double>(kept_w / total);
    return dec;
}

double part_separation(const SparseDecomposition& dec) {
    double best = inf;
    for (std::size_t i = 0; i < dec.parts.size(); ++i)
        for (std::size_t j = i + 1; j < dec.parts.size(); ++j)
            for (const auto& p : dec.parts[i])
                for (const auto& q : dec.parts[j]) best = std::min(best, static_cast<double>(norm_inf(p - q)));
    return best;
}

// ---------------------------------------------------------------------------
// Lemma checks
// ---------------------------------------------------------------------------

NucConstants nuc_constants(double eps, double norm_bound, std::int64_t bandwidth, int dim) {
    if (!(eps > 0.0) || !(norm_bound > 0.0)) throw PreconditionError("nuc_constants: eps and norm bound must be positive");
    NucConstants k;
    k.norm_bound = norm_bound;
    k.eps = eps;
    const double x = std::pow(0.5 * eps / (6.0 * norm_bound), 2);
    k.c = 1.0 / (1.0 + x);
    k.gap = static_cast<double>(2 * bandwidth + 1);
    // 1 - c^{1/d} without cancellation: c = 1/(1+x).
    k.block_length = block_length_from(2 * bandwidth + 1, -std::expm1(-std::log1p(x) / dim));
    k.theta = static_cast<double>(k.block_length);
    return k;
}

NucReport verify_nuc(const LatticeKernel& a, double eps, const std::vector<SupportRegion>& suite, double norm_bound,
                     Exec exec) {
    if (norm_bound <= 0.0) {
        for (const auto& reg : suite) norm_bound = std::max(norm_bound, schur_norm_bound(a, reg.window));
        norm_bound = std::max(norm_bound, 1e-12);
    }
    NucReport rep;
    rep.constants = nuc_constants(eps, norm_bound, a.bandwidth(), a.dim());
    const auto& k = rep.constants;
    rep.regions.resize(suite.size());
    std::vector<Vector> witnesses(suite.size());

    parallel_for(
        suite.size(),
        [&](std::size_t idx) {
            const auto& reg = suite[idx];
            reg.check_margin(a.bandwidth());
            auto& out = rep.regions[idx];
            std::vector<Point> cols;
            const auto nu = lower_norm_with_witness(a, reg.mask, &cols);
            out.nu = nu.value;
            out.nu_theta = nu_theta_detail(a, cols, k.theta, false, NuMethod::dense, Exec::serial).value;
            out.holds = out.nu_theta <= out.nu + eps;
            witnesses[idx] = nu.witness;

            std::vector<WeightedPoint> w;
            for (std::size_t j = 0; j < cols.size(); ++j)
                w.push_back({cols[j], std::norm(nu.witness(static_cast<Eigen::Index>(j)))});
            const auto dec = sparsify(w, k.gap, k.c);
            std::unordered_map<Point, std::size_t, PointHash> col_index;
            for (std::size_t j = 0; j < cols.size(); ++j) col_index.emplace(cols[j], j);
            out.witness_ratio = inf;
            for (const auto& part : dec.parts) {
                Vector ui(static_cast<Eigen::Index>(part.size()));
                for (std::size_t j = 0; j < part.size(); ++j)
                    ui(static_cast<Eigen::Index>(j)) = nu.witness(static_cast<Eigen::Index>(col_index.at(part[j])));
                const double un = ui.norm();
                if (un == 0.0) continue;
                const Matrix block = restrict_to(a, expand(part, a.bandwidth()), part, dense_row_cap);
                const double ratio = (block * ui).norm() / un;
                if (ratio < out.witness_ratio) {
                    out.witness_ratio = ratio;
                    out.witness_diameter = diameter(part);
                }
            }
            out.witness_bound = out.nu / std::sqrt(k.c) + k.norm_bound * std::sqrt(1.0 / k.c - 1.0);
            out.witness_holds = out.witness_ratio <= out.witness_bound * (1.0 + 1e-12) + 1e-14 &&
                                static_cast<double>(out.witness_diameter) < k.theta;
        },
        exec);

    for (std::size_t idx = 0; idx < suite.size(); ++idx) {
        const auto& out = rep.regions[idx];
        rep.max_slack = std::max(rep.max_slack, out.nu_theta - out.nu);
        if (!out.holds || !out.witness_holds) {
            ++rep.violations;
            if (!rep.counterexample) {
                rep.counterexample = idx;
                rep.counterexample_witness = witnesses[idx];
            }
        }
    }
    return rep;
}

std::vector<Point> open_ball(int dim, double radius) {
    if (!(radius > 0.0)) return {};
    const auto r = static_cast<std::int64_t>(std::ceil(radius)) - 1;
    return ball(zero_point(dim), r);
}

namespace {

/// Lowest-lex point among those maximizing |v|; `pts` is sorted.
Point recentre_point(const std::vector<Point>& pts, const Vector& v) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < pts.size(); ++j)
        if (std::abs(v(static_cast<Eigen::Index>(j))) > std::abs(v(static_cast<Eigen::Index>(best)))) best = j;
    return pts[best];
}

bool fits(const std::vector<Point>& pts, const Point& shift, const Window& ambient, std::int64_t r) {
    for (const auto& p : pts)
        if (ambient.depth(p + shift) <= r) return false;
    return true;
}

std::vector<Point> shifted_points(const std::vector<Point>& pts, const Point& shift) {
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p + shift);
    return out;
}

}  // namespace

ConcentrateResult concentrate_translate(const LatticeKernel& s, const std::vector<double>& eps,
                                        const std::vector<double>& theta, const Window& ambient, Exec exec) {
    if (eps.size() != theta.size() || eps.empty())
        throw PreconditionError("concentrate_translate: eps and theta lists must be nonempty and of equal length");
    const std::size_t n = eps.size();
    const int d = s.dim();
    const std::int64_t r = s.bandwidth();
    // Later steps move by less than the sum of theta and the final balls reach
    // that sum plus max theta, so the first witness is searched where all of
    // them stay inside the ambient window.
    double theta_sum = 0.0, theta_max = 0.0;
    for (double t : theta) {
        theta_sum += t;
        theta_max = std::max(theta_max, t);
    }
    const auto reach = r + static_cast<std::int64_t>(std::ceil(2.0 * theta_sum + theta_max));
    if (2 * reach >= ambient.side) {
        ConcentrateResult partial{s, zero_point(d), {}, 0.0, {}, {}, {}, 0, false};
        partial.nu_ambient = lower_norm(s, SupportRegion::interior(ambient, r).mask);
        return partial;
    }
    const auto amb = SupportRegion::interior(ambient, reach);

    ConcentrateResult res{s, zero_point(d), {}, 0.0, {}, {}, {}, 0, false};
    res.nu_ambient = lower_norm(s, amb.mask);

    std::vector<double> eps_r(eps.rbegin(), eps.rend());
    std::vector<double> theta_r(theta.rbegin(), theta.rend());

    Point y = zero_point(d);
    double claimed = res.nu_ambient;
    for (std::size_t i = 0; i < n; ++i) {
        const LatticeKernel si = translate(s, y);
        std::vector<Point> domain;
        if (i == 0) {
            domain = shifted_points(amb.mask, -y);
        } else {
            domain = open_ball(d, theta_r[i - 1]);
            if (!fits(domain, y, ambient, r)) break;
        }
        const auto box = nu_theta_detail(si, domain, theta_r[i], true, NuMethod::dense, exec);
        const Point x = recentre_point(box.support, box.witness);
        claimed += eps_r[i];
        res.steps.push_back({x, box.value, claimed});
        y = y + x;
        res.depth = i + 1;
    }

    res.total_offset = y;
    res.translate = translate(s, y);
    if (res.depth < n) return res;

    double zeta_prefix = 0.0;
    bool all_fit = true;
    for (std::size_t m = 0; m < n; ++m) {
        zeta_prefix += theta[m];
        const double zeta = zeta_prefix + theta[m];
        const auto ballm = open_ball(d, zeta);
        if (!fits(ballm, y, ambient, r)) {
            all_fit = false;
            break;
        }
        double tail = 0.0;
        for (std::size_t k = m; k < n; ++k) tail += eps[k];
        res.radii.push_back(zeta);
        res.achieved_bounds.push_back(lower_norm(res.translate, ballm, ballm.size() <= 2048 ? NuMethod::dense : NuMethod::banded));
        res.claimed_bounds.push_back(res.nu_ambient + tail);
    }
    res.complete = all_fit;
    return res;
}

}  // namespace limspec
