#include "doctest.h"

#include "limspec/limit_ops.hpp"

using namespace limspec;

namespace {

const LocalProbe probe1 = LocalProbe::exponential(1, 10);
const LocalProbe probe2 = LocalProbe::exponential(2, 5);

LatticeKernel laplacian_plus(const PotentialSymbol& v, std::optional<std::int64_t> clamp = std::nullopt) {
    BuildOptions opts;
    opts.selfadjoint = true;
    if (clamp) opts.clamp_window = Window::centered(zero_point(v.dim), *clamp);
    return build_schrodinger(laplacian_hops(v.dim), v, opts);
}

std::vector<double> doubling(double start, int count) {
    std::vector<double> r;
    for (int k = 0; k < count; ++k) r.push_back(start * std::pow(2.0, k));
    return r;
}

}  // namespace

TEST_SUITE("sequences") {
    TEST_CASE("ray rounding and plateau centres") {
        const auto ray = realize(ray_sequence({1.0}, {10, 20, 40}));
        CHECK(ray == std::vector<Point>{Point{10}, Point{20}, Point{40}});
        const auto neg = realize(ray_sequence({-2.0}, {10, 20}));
        CHECK(neg == std::vector<Point>{Point{-10}, Point{-20}});
        CHECK(realize(plateau_centers({3, 4, 10})) == std::vector<Point>{Point{9}, Point{16}, Point{100}});
        CHECK(realize(plateau_centers({3, 4, 10}, true)) == std::vector<Point>{Point{10}, Point{18}, Point{105}});
        const auto diag = realize(ray_sequence({1.0, 1.0}, {10, 20}));
        CHECK(diag[0] == Point{7, 7});
        CHECK(diag[1] == Point{14, 14});
    }

    TEST_CASE("norms must increase") {
        CHECK_THROWS_AS(realize(explicit_sequence({Point{5}, Point{3}, Point{9}})), PreconditionError);
        CHECK_NOTHROW(realize(explicit_sequence({Point{3}, Point{-5}, Point{9}})));
    }

    TEST_CASE("sequence ends") {
        CHECK(sequence_end(ray_sequence({1.0}, {1, 2, 3})) == 1);
        CHECK(sequence_end(ray_sequence({-1.0}, {1, 2, 3})) == -1);
        CHECK(sequence_end(explicit_sequence({Point{3}, Point{-5}, Point{9}})) == 0);
    }

    TEST_CASE("critical fractional targets sit at xi_m + c / theta") {
        const auto v = modulated_power(1.0, 0.5, 1.0, 2.0);
        const auto pts = realize(fractional_target(0.5, 4, 100, 2), &v);
        REQUIRE(!pts.empty());
        for (const auto& p : pts) {
            // xi_m = m^2; the offset c / theta = 1.
            const double root = std::sqrt(static_cast<double>(p[0] - 1));
            CHECK(std::abs(root - std::round(root)) <= 1e-9);
        }
    }
}

TEST_SUITE("symbolic_limit") {
    TEST_CASE("two-sided limits pick the end") {
        const auto v = two_sided_tanh(1.0, 3.0, 2.0);
        const auto up = symbolic_limit(v, ray_sequence({1.0}, {10, 20, 40}));
        REQUIRE(up.kind == LimitKind::finite);
        CHECK(up.symbol->as<symbol::Constant>()->value == cplx(3.0));
        const auto down = symbolic_limit(v, ray_sequence({-1.0}, {10, 20, 40}));
        CHECK(down.symbol->as<symbol::Constant>()->value == cplx(1.0));
    }

    TEST_CASE("decaying potentials vanish") {
        const auto l = symbolic_limit(decaying_gaussian(2.0, 3.0), ray_sequence({1.0}, {10, 20, 40}));
        REQUIRE(l.kind == LimitKind::finite);
        CHECK(l.symbol->as<symbol::Constant>()->value == cplx(0.0));
    }

    TEST_CASE("modulated power: three regimes") {
        const auto seq = fractional_target(0.5, 4, 100, 2);
        // a > mu (1 - theta)
        CHECK(symbolic_limit(modulated_power(2.0, 0.5, 1.0, 2.0), seq).kind == LimitKind::infinity);
        // a = mu (1 - theta)
        const auto crit = symbolic_limit(modulated_power(1.0, 0.5, 1.5, 2.0), seq);
        REQUIRE(crit.kind == LimitKind::finite);
        const auto* w = crit.symbol->as<symbol::Well>();
        REQUIRE(w != nullptr);
        CHECK(w->lambda == 1.5);
        CHECK(w->theta == 0.5);
        CHECK(w->c == 0.5);
        CHECK(w->mu == 2.0);
        // a < mu (1 - theta)
        const auto sub = symbolic_limit(modulated_power(0.5, 0.5, 1.0, 2.0), fractional_target(3.0, 4, 1000, 2));
        REQUIRE(sub.kind == LimitKind::finite);
        CHECK(sub.symbol->as<symbol::Constant>()->value == cplx(3.0));
    }

    TEST_CASE("plateau centres give the wall, midpoints the free operator") {
        const auto wall = symbolic_limit(plateau(), plateau_centers({10, 20, 40}));
        REQUIRE(wall.kind == LimitKind::finite);
        CHECK(wall.symbol->is<symbol::Wall>());
        const auto mid = symbolic_limit(plateau(), plateau_centers({10, 20, 40}, true));
        REQUIRE(mid.kind == LimitKind::finite);
        CHECK(mid.symbol->as<symbol::Constant>()->value == cplx(0.0));
    }

    TEST_CASE("oscillating phase and ramps") {
        CHECK(symbolic_limit(oscillatory_phase(), ray_sequence({1.0}, {10, 20, 40})).kind == LimitKind::no_limit);
        CHECK(symbolic_limit(affine_ramp(1.0), ray_sequence({1.0}, {10, 20, 40})).kind == LimitKind::infinity);
    }

    TEST_CASE("separable terms along a ray") {
        const auto v = separable(2, {separable_term({{1, 0}}, decaying_gaussian(-1.5, 2.0)),
                                     separable_term({{0, 1}}, decaying_gaussian(-1.0, 2.0))});
        const auto along_x = symbolic_limit(v, ray_sequence({1.0, 0.0}, {10, 20, 40}));
        REQUIRE(along_x.kind == LimitKind::finite);
        // The y-term survives: the limit depends on coordinate 1 only.
        CHECK(dependence_mask(*along_x.symbol) == 2u);
        const auto diag = symbolic_limit(v, ray_sequence({1.0, 1.0}, {10, 20, 40}));
        REQUIRE(diag.kind == LimitKind::finite);
        CHECK(dependence_mask(*diag.symbol) == 0u);
    }
}

TEST_SUITE("numeric_limit") {
    TEST_CASE("decaying perturbation of the laplacian") {
        const auto a = laplacian_plus(decaying_inverse_square(1.0, 2.0));
        const auto l = numeric_limit(a, ray_sequence({1.0}, doubling(100, 6)), probe1);
        REQUIRE(l.kind == LimitKind::finite);
        CHECK(l.agrees_with_symbolic);
        REQUIRE(!l.certificate.empty());
        CHECK(l.certificate.back().gap < 1e-3);
        const auto free = build_schrodinger(laplacian_hops(1), constant_potential(0.0));
        CHECK(local_distance(*l.op, free, probe1) < 1e-3);
    }

    TEST_CASE("oscillating phase times the mollified shift has no limit") {
        const auto a = band_mollify(compose(build_schrodinger({}, oscillatory_phase()),
                                            build_schrodinger(shift_hops(), constant_potential(0.0))),
                                    0.5);
        const auto l = numeric_limit(a, ray_sequence({1.0}, doubling(10, 8)), probe1);
        CHECK(l.kind == LimitKind::no_limit);
        CHECK(l.divergence_certified);
        // Gaps never settle below the tolerance.
        for (const auto& e : l.certificate) CHECK(e.gap >= 1e-3);
    }

    TEST_CASE("plateau centres localize to the Dirichlet wall") {
        const auto a = laplacian_plus(plateau(), 101);
        const auto l = numeric_limit(a, plateau_centers({10, 20, 40, 80, 160, 320, 640, 1280}), probe1);
        REQUIRE(l.kind == LimitKind::finite);
        CHECK(l.mode == LimitMode::resolvent);
        REQUIRE(l.symbol.has_value());
        CHECK(l.symbol->is<symbol::Wall>());
        CHECK(l.agrees_with_symbolic);
    }

    TEST_CASE("a linear ramp is detected as infinity") {
        const auto a = laplacian_plus(affine_ramp(1.0), 101);
        const auto l = numeric_limit(a, ray_sequence({1.0}, doubling(10, 6)), probe1);
        CHECK(l.kind == LimitKind::infinity);
        REQUIRE(l.infinity_from.has_value());
        for (std::size_t k = *l.infinity_from; k < l.resolvent_norms.size(); ++k) CHECK(l.resolvent_norms[k] <= 0.1);
    }

    TEST_CASE("translates approach the limit along the sequence") {
        const auto a = laplacian_plus(two_sided_tanh(0.0, 2.0, 3.0));
        const auto seq = ray_sequence({1.0}, doubling(20, 6));
        const auto l = numeric_limit(a, seq, probe1);
        REQUIRE(l.kind == LimitKind::finite);
        double prev = 1e9;
        for (const auto& x : realize(seq)) {
            const double d = local_distance(translate(a, x), *l.op, probe1);
            CHECK(d <= prev + 1e-15);
            prev = d;
        }
        CHECK(prev <= l.certificate.back().gap + 1e-12);
    }
}

TEST_SUITE("directional_limit") {
    const auto f_plus_g = separable(2, {separable_term({{1, 0}}, decaying_gaussian(-1.5, 2.0)),
                                        separable_term({{0, 1}}, decaying_gaussian(-1.0, 2.0))});

    TEST_CASE("along e1 the y-well survives") {
        const auto a = laplacian_plus(f_plus_g);
        const auto d = directional_limit(a, {1.0, 0.0}, {20, 40, 80, 160}, probe2);
        REQUIRE(d.limit.kind == LimitKind::finite);
        const auto expect = laplacian_plus(separable(2, {separable_term({{0, 1}}, decaying_gaussian(-1.0, 2.0))}));
        CHECK(local_distance(*d.limit.op, expect, probe2) < 1e-3);
        CHECK(d.independent);
    }

    TEST_CASE("along the diagonal both wells vanish") {
        const auto a = laplacian_plus(f_plus_g);
        const auto d = directional_limit(a, {1.0, 1.0}, {20, 40, 80, 160}, probe2);
        REQUIRE(d.limit.kind == LimitKind::finite);
        CHECK(local_distance(*d.limit.op, laplacian_plus(constant_potential(0.0, 2)), probe2) < 1e-3);
        CHECK(d.representative_gap < 1e-3);
    }

    TEST_CASE("constant potentials are left unchanged") {
        const auto a = laplacian_plus(constant_potential(0.7, 2));
        for (auto alpha : {std::vector<double>{1, 0}, std::vector<double>{0, -1}, std::vector<double>{3, 1}}) {
            const auto d = directional_limit(a, alpha, {20, 40, 80, 160}, probe2);
            REQUIRE(d.limit.kind == LimitKind::finite);
            CHECK(local_distance(*d.limit.op, a, probe2) == 0.0);
        }
    }

    TEST_CASE("terms invariant along the direction are kept entrywise") {
        // Only the y-term, and alpha along x: the projection kills alpha.
        const auto a = laplacian_plus(separable(2, {separable_term({{0, 1}}, decaying_gaussian(-1.0, 2.0))}));
        const auto d = directional_limit(a, {1.0, 0.0}, {20, 40, 80, 160}, probe2);
        REQUIRE(d.limit.kind == LimitKind::finite);
        for (std::int64_t y = -4; y <= 4; ++y) CHECK(std::abs((*d.limit.op)(Point{0, y}, Point{0, y}) - a(Point{0, y}, Point{0, y})) < 1e-12);
    }
}

TEST_SUITE("operator_spectrum_sample") {
    TEST_CASE("two-sided potential has two limits") {
        const auto a = laplacian_plus(two_sided_tanh(0.0, 2.0, 3.0));
        const auto ls = operator_spectrum_sample(
            a, {ray_sequence({1.0}, doubling(100, 5)), ray_sequence({-1.0}, doubling(100, 5)),
                ray_sequence({1.0}, doubling(150, 5))},
            probe1);
        CHECK(ls.size() == 2);
    }

    TEST_CASE("constant potential has one limit, the operator itself") {
        const auto a = laplacian_plus(constant_potential(1.5));
        const auto ls = operator_spectrum_sample(
            a, {ray_sequence({1.0}, doubling(10, 4)), ray_sequence({-1.0}, doubling(10, 4))}, probe1);
        REQUIRE(ls.size() == 1);
        CHECK(local_distance(*ls[0].op, a, probe1) == 0.0);
    }

    TEST_CASE("plateau: wall and free laplacian") {
        const auto a = laplacian_plus(plateau(), 101);
        const std::vector<std::int64_t> n{10, 20, 40, 80, 160, 320, 640, 1280};
        const auto ls = operator_spectrum_sample(a, {plateau_centers(n), plateau_centers(n, true)}, probe1);
        REQUIRE(ls.size() == 2);
        CHECK(ls[0].symbol->is<symbol::Wall>());
        CHECK(ls[1].symbol->as<symbol::Constant>()->value == cplx(0.0));
    }

    TEST_CASE("deduplication is idempotent") {
        const auto a = laplacian_plus(two_sided_tanh(0.0, 2.0, 3.0));
        const auto ls = operator_spectrum_sample(
            a, {ray_sequence({1.0}, doubling(100, 5)), ray_sequence({-1.0}, doubling(100, 5))}, probe1);
        const auto again = dedupe_limits(ls, probe1, 1e-3);
        REQUIRE(again.size() == ls.size());
        for (std::size_t k = 0; k < ls.size(); ++k) CHECK(again[k].id == ls[k].id);
    }

    TEST_CASE("serial and parallel agree") {
        const auto a = laplacian_plus(two_sided_tanh(0.0, 2.0, 3.0));
        const std::vector<DirectionSequence> seqs{ray_sequence({1.0}, doubling(100, 5)),
                                                  ray_sequence({-1.0}, doubling(100, 5))};
        const auto s = operator_spectrum_sample(a, seqs, probe1, {}, Exec::serial);
        const auto p = operator_spectrum_sample(a, seqs, probe1, {}, Exec::parallel);
        REQUIRE(s.size() == p.size());
        for (std::size_t k = 0; k < s.size(); ++k) CHECK(s[k].certificate == p[k].certificate);
    }
}
