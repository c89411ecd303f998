#include "limspec/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "limspec/linalg.hpp"
#include "limspec/lower_norm.hpp"
#include "limspec/resolvent.hpp"
#include "limspec/scenario.hpp"

namespace limspec {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_from(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

SuiteCheck check(std::string name, double value, double tol, std::string detail, bool below = true) {
    const bool ok = below ? value <= tol : value >= tol;
    return {std::move(name), ok, value, tol, std::move(detail)};
}

/// Hausdorff distance between two finite point sets in C.
double set_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return inf;
    auto one = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        double worst = 0.0;
        for (cplx p : x) {
            double best = inf;
            for (cplx q : y) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one(a, b), one(b, a));
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n, bool hermitian) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    if (hermitian) return (m + m.adjoint()) * 0.5;
    // Strengthen the strictly upper part so the sample is far from normal.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) *= 3.0;
    return m;
}

std::vector<cplx> eigenvalues(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"lemmas", "resolvent", "mollifier"};
    return names;
}

LatticeKernel random_band_kernel(std::uint64_t seed, std::int64_t r, double norm_bound) {
    if (r < 0) throw PreconditionError("bandwidth must be nonnegative");
    const double scale = norm_bound / (static_cast<double>(2 * r + 1) * std::sqrt(2.0));
    const std::uint64_t key = splitmix(seed);
    KernelRule rule = [key, scale](const Point& x, const Point& y) {
        const auto hx = static_cast<std::uint64_t>(x[0]), hm = static_cast<std::uint64_t>(y[0] - x[0]);
        const std::uint64_t h = splitmix(key ^ splitmix(hx * 0x9e3779b97f4a7c15ULL + hm));
        return cplx(unit_from(h), unit_from(splitmix(h))) * scale;
    };
    return LatticeKernel(1, r, rule, norm_bound);
}

SuiteResult lemma_suite(std::uint64_t seed, Exec exec) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult res{"lemmas", {}, 0.0};
    std::mt19937_64 rng(seed);

    // Lower-norm localization on 100 random band operators, 20 regions each.
    std::size_t violations = 0, regions = 0;
    double worst_ratio = 0.0;
    std::vector<LatticeKernel> ops;
    for (int k = 0; k < 100; ++k) {
        const std::int64_t r = std::uniform_int_distribution<std::int64_t>(1, 3)(rng);
        ops.push_back(random_band_kernel(rng(), r, 2.0));
        std::vector<SupportRegion> suite;
        for (int j = 0; j < 20; ++j) {
            const std::int64_t side = std::uniform_int_distribution<std::int64_t>(2 * r + 4, 40)(rng);
            const std::int64_t off = std::uniform_int_distribution<std::int64_t>(-1000, 1000)(rng);
            auto reg = SupportRegion::interior(Window(Point{off}, side), r);
            if (j % 2 == 1) {
                // Random sub-mask; keeps at least one point.
                std::vector<Point> sub;
                for (const auto& p : reg.mask)
                    if (std::bernoulli_distribution(0.6)(rng)) sub.push_back(p);
                if (!sub.empty()) reg.mask = std::move(sub);
            }
            suite.push_back(std::move(reg));
        }
        const auto rep = verify_nuc(ops.back(), 0.25, suite, 2.0, exec);
        violations += rep.violations;
        regions += rep.regions.size();
        for (const auto& o : rep.regions)
            if (o.witness_bound > 0) worst_ratio = std::max(worst_ratio, o.witness_ratio / o.witness_bound);
    }
    res.checks.push_back(check("verify_nuc violations", static_cast<double>(violations), 0.0,
                               std::to_string(regions) + " regions on 100 operators; largest witness ratio / bound " +
                                   fmt(worst_ratio)));

    // Concentration bounds, re-derived from an explicit SVD of each block.
    double worst_diff = 0.0, worst_excess = -inf;
    std::size_t verified = 0;
    for (int k = 0; k < 10; ++k) {
        const auto& a = ops[static_cast<std::size_t>(k)];
        const auto c = concentrate_translate(a, {0.3, 0.2, 0.1}, {3.0, 3.0, 3.0}, Window(Point{-48}, 96), exec);
        for (std::size_t m = 0; m < c.achieved_bounds.size(); ++m) {
            const auto cols = open_ball(1, c.radii[m]);
            const Matrix block = restrict_to(c.translate, expand(cols, a.bandwidth()), cols, 1u << 16);
            Eigen::JacobiSVD<Matrix> svd(block);
            const double ref = svd.singularValues()(svd.singularValues().size() - 1);
            worst_diff = std::max(worst_diff, std::abs(ref - c.achieved_bounds[m]));
            worst_excess = std::max(worst_excess, ref - c.claimed_bounds[m]);
            ++verified;
        }
    }
    res.checks.push_back(check("concentrate_translate bounds reproduced", worst_diff, 1e-9,
                               std::to_string(verified) + " ball bounds recomputed by dense SVD"));
    res.checks.push_back(check("concentrate_translate achieved <= claimed", worst_excess, 1e-9,
                               "largest achieved - claimed " + fmt(worst_excess)));
    res.checks.push_back(check("concentrate_translate bounds exercised", static_cast<double>(verified), 1.0,
                               std::to_string(verified) + " bounds", false));

    // Sparsification keeps at least the target fraction and separates parts.
    double worst_keep = inf, worst_sep = inf;
    for (int k = 0; k < 200; ++k) {
        const int d = 1 + k % 2;
        const double gap = std::uniform_int_distribution<int>(1, 5)(rng);
        const double target = std::uniform_real_distribution<double>(0.3, 0.95)(rng);
        const int n = std::uniform_int_distribution<int>(5, 120)(rng);
        std::vector<WeightedPoint> w;
        for (int i = 0; i < n; ++i) {
            Point p(d);
            for (int c = 0; c < d; ++c) p[c] = std::uniform_int_distribution<std::int64_t>(-60, 60)(rng);
            w.push_back({p, std::exponential_distribution<double>(1.0)(rng)});
        }
        const auto dec = sparsify(w, gap, target);
        worst_keep = std::min(worst_keep, dec.kept_fraction - target);
        worst_sep = std::min(worst_sep, part_separation(dec) - gap);
    }
    res.checks.push_back(check("sparsify kept fraction - c", worst_keep, 0.0, "200 random weight sets", false));
    res.checks.push_back(check("sparsify part separation - R", worst_sep, 0.0, "200 random weight sets", false));

    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

SuiteResult resolvent_suite(std::uint64_t seed, Exec exec) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult res{"resolvent", {}, 0.0};
    std::mt19937_64 rng(seed);
    for (bool hermitian : {true, false}) {
        const std::string tag = hermitian ? " (Hermitian)" : " (non-normal)";
        double identity = 0.0, mapping = 0.0, base = 0.0, assoc = 0.0;
        for (int k = 0; k < 50; ++k) {
            const auto n = std::uniform_int_distribution<Eigen::Index>(1, 12)(rng);
            const Matrix h = random_matrix(rng, n, hermitian);
            const double radius = linalg::largest_singular_value(h) + 1.0;
            const cplx a{0.0, radius}, b{-radius, 0.5}, c{radius, -0.25 * radius};
            const std::vector<cplx> pts{a, b, c, std::conj(a)};
            const auto ra = PseudoResolvent::of_matrix(h, pts, a, hermitian);
            const auto rb = PseudoResolvent::of_matrix(h, pts, b, hermitian);

            std::vector<std::pair<cplx, cplx>> pairs;
            for (cplx p : pts)
                for (cplx q : pts) pairs.emplace_back(p, q);
            identity = std::max(identity, check_resolvent_identity(ra, pairs, 1e-10, exec).max_residual);

            const auto spec = eigenvalues(h);
            const auto from_a = resolvent_spectrum_map(ra), from_b = resolvent_spectrum_map(rb);
            mapping = std::max(mapping, set_distance(from_a, spec));
            base = std::max(base, set_distance(from_a, from_b));

            const auto op = associated_operator(ra);
            assoc = std::max(assoc, op.infinity ? inf : (op.full_matrix() - h).cwiseAbs().maxCoeff());
        }
        res.checks.push_back(check("resolvent identity residual" + tag, identity, 1e-10, "50 matrices, 16 pairs each"));
        res.checks.push_back(check("spectral mapping round trip" + tag, mapping, 1e-8, "Hausdorff to the eigenvalues"));
        res.checks.push_back(check("base-point independence" + tag, base, 1e-8, "Hausdorff between base points"));
        res.checks.push_back(check("associated operator round trip" + tag, assoc, 1e-9, "max entrywise error"));
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

SuiteResult mollifier_suite(std::uint64_t seed, Exec exec) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult res{"mollifier", {}, 0.0};
    std::mt19937_64 rng(seed);

    // Norm contraction on windows.
    const std::vector<double> epss{0.5, 0.25, 0.125};
    std::vector<double> excess(100, -inf);
    std::vector<std::uint64_t> seeds(100);
    for (auto& s : seeds) s = rng();
    parallel_for(
        100,
        [&](std::size_t k) {
            const auto a = random_band_kernel(seeds[k], 3, 2.0);
            const Window w(Point{static_cast<std::int64_t>(k) * 37 - 1800}, 16 + static_cast<std::int64_t>(k % 17));
            const double base = window_norm(a, w);
            for (double e : epss) excess[k] = std::max(excess[k], window_norm(band_mollify(a, e), w) - base);
        },
        exec);
    res.checks.push_back(check("mollified window norm - original", *std::max_element(excess.begin(), excess.end()), 1e-12,
                               "100 seeds, eps in {1/2, 1/4, 1/8}, window sides 16..32"));

    // Largest surviving hop equals ceil(1/eps) - 1 for a kernel with every hop up to 12 present.
    std::size_t mismatches = 0;
    HopMap wide;
    for (std::int64_t m = -12; m <= 12; ++m) wide.emplace_back(Point{m}, cplx(1.0, 0.0));
    const auto full = build_schrodinger(wide, constant_potential(0.0, 1));
    std::string detail;
    for (double e : {1.0, 0.75, 0.5, 0.4, 1.0 / 3.0, 0.3, 0.25, 0.2, 0.15, 0.125, 0.1}) {
        const auto expected = std::min<std::int64_t>(12, static_cast<std::int64_t>(std::ceil(1.0 / e - 1e-12)) - 1);
        const auto m = band_mollify(full, e);
        std::int64_t last = -1;
        for (std::int64_t h = 0; h <= 12; ++h)
            if (m(Point{0}, Point{h}) != cplx{}) last = h;
        if (last != expected || mollified_bandwidth(e) != static_cast<std::int64_t>(std::ceil(1.0 / e - 1e-12)) - 1) {
            ++mismatches;
            detail += "eps=" + fmt(e) + " ";
        }
    }
    res.checks.push_back(check("bandwidth bound mismatches", static_cast<double>(mismatches), 0.0,
                               detail.empty() ? "11 eps values" : detail));

    // Window-norm distance to A decreases as eps halves (uniformly continuous symbols).
    const std::vector<PotentialSymbol> symbols{decaying_gaussian(1.0, 4.0), decaying_inverse_square(2.0, 3.0),
                                               two_sided_tanh(-1.0, 2.0, 5.0)};
    HopMap hop3;
    for (std::int64_t m = -3; m <= 3; ++m)
        if (m != 0) hop3.emplace_back(Point{m}, cplx(-1.0 / static_cast<double>(m * m), 0.1 * static_cast<double>(m)));
    std::size_t non_monotone = 0;
    double last_distance = 0.0;
    for (const auto& hop : {laplacian_hops(1), hop3})
        for (const auto& v : symbols) {
            const auto a = build_schrodinger(hop, v);
            const Window w(Point{-32}, 64);
            const Matrix base = compress(a, w);
            double prev = inf;
            for (double e : {0.5, 0.25, 0.125, 0.0625}) {
                const double d = linalg::largest_singular_value(compress(band_mollify(a, e), w) - base);
                if (!(d < prev)) ++non_monotone;
                prev = d;
            }
            last_distance = std::max(last_distance, prev);
        }
    res.checks.push_back(check("non-monotone convergence steps", static_cast<double>(non_monotone), 0.0,
                               "6 operators, eps 1/2 to 1/16; largest distance at 1/16 " + fmt(last_distance)));

    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<SuiteResult> run_suite(const std::string& name, std::uint64_t seed, Exec exec) {
    if (name == "lemmas") return {lemma_suite(seed, exec)};
    if (name == "resolvent") return {resolvent_suite(seed, exec)};
    if (name == "mollifier") return {mollifier_suite(seed, exec)};
    if (name == "all") return {lemma_suite(seed, exec), resolvent_suite(seed, exec), mollifier_suite(seed, exec)};
    throw ConfigError("suite", "unknown suite \"" + name + "\" (expected lemmas, resolvent, mollifier or all)");
}

}  // namespace limspec
