#include "doctest.h"

#include <algorithm>

#include "limspec/spectra.hpp"
#include "oracles.hpp"

using namespace limspec;

namespace {

const LocalProbe probe1 = LocalProbe::exponential(1, 10);

LatticeKernel laplacian_plus(const PotentialSymbol& v) {
    return build_schrodinger(laplacian_hops(1), v, {.selfadjoint = true});
}

std::vector<double> doubling(double start, int count) {
    std::vector<double> r;
    for (int k = 0; k < count; ++k) r.push_back(start * std::pow(2.0, k));
    return r;
}

std::vector<LimitOperator> limits_of(const LatticeKernel& a) {
    return operator_spectrum_sample(
        a, {ray_sequence({1.0}, doubling(100, 5)), ray_sequence({-1.0}, doubling(100, 5))}, probe1);
}

std::vector<std::pair<double, double>> pairs(const std::vector<Interval>& in) {
    std::vector<std::pair<double, double>> out;
    for (const auto& i : in) out.emplace_back(i.lo, i.hi);
    return out;
}

std::vector<Interval> iv(std::initializer_list<std::pair<double, double>> in) {
    std::vector<Interval> out;
    for (const auto& [lo, hi] : in) out.push_back({lo, hi});
    return out;
}

}  // namespace

TEST_SUITE("window_spectrum") {
    TEST_CASE("Dirichlet laplacian of side 5") {
        const auto e = window_spectrum(laplacian_plus(constant_potential(0.0)), Window(Point{0}, 5), true);
        const auto expect = oracle::dirichlet_eigenvalues(5);
        REQUIRE(e.points.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) CHECK(e.points[k].real() == doctest::Approx(expect[k]).epsilon(1e-13));
    }

    TEST_CASE("identity") {
        const auto e = window_spectrum(identity_kernel(1), Window(Point{0}, 7), true);
        REQUIRE(e.points.size() == 7);
        for (auto z : e.points) CHECK(std::abs(z - cplx(1.0)) <= 1e-14);
    }

    TEST_CASE("truncated shift is nilpotent") {
        const auto e = window_spectrum(build_schrodinger(shift_hops(), constant_potential(0.0)), Window(Point{0}, 8), false);
        REQUIRE(e.points.size() == 8);
        for (auto z : e.points) CHECK(std::abs(z) <= 1e-8);
    }
}

TEST_SUITE("symbol_spectrum") {
    TEST_CASE("laplacian band") {
        const auto e = symbol_spectrum(laplacian_hops(1), {0.0});
        REQUIRE(e.intervals.size() == 1);
        CHECK(e.intervals[0].lo == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(e.intervals[0].hi == doctest::Approx(4.0).epsilon(1e-12));
    }

    TEST_CASE("bilateral shift is the unit circle") {
        const auto e = symbol_spectrum(shift_hops(), {0.0}, 4096, 0.05);
        CHECK(e.kind == EstimateKind::complex_cells);
        REQUIRE(!e.cells.empty());
        for (const auto& c : e.cells) CHECK(std::abs(std::abs(c.center) - 1.0) <= c.half_width * std::sqrt(2.0) + 1e-12);
        // Every direction is hit.
        for (int k = 0; k < 36; ++k) {
            const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * k / 36);
            bool hit = false;
            for (const auto& c : e.cells)
                hit = hit || (std::abs(z.real() - c.center.real()) <= c.half_width + 1e-12 &&
                              std::abs(z.imag() - c.center.imag()) <= c.half_width + 1e-12);
            CHECK(hit);
        }
    }

    TEST_CASE("period-2 potential opens a gap at the closed-form edges") {
        const auto e = symbol_spectrum(laplacian_hops(1), {0.0, 4.0});
        const auto edges = oracle::dimer_band_edges(0.0, 4.0);
        REQUIRE(e.intervals.size() == 2);
        CHECK(e.intervals[0].lo == doctest::Approx(edges[0]).epsilon(1e-9));
        CHECK(e.intervals[0].hi == doctest::Approx(edges[1]).epsilon(1e-9));
        CHECK(e.intervals[1].lo == doctest::Approx(edges[2]).epsilon(1e-9));
        CHECK(e.intervals[1].hi == doctest::Approx(edges[3]).epsilon(1e-9));
    }

    TEST_CASE("agrees with interior-filtered Dirichlet windows of side 256") {
        for (const auto& values : std::vector<std::vector<cplx>>{{0.0}, {0.0, 1.0}, {0.0, 4.0}, {1.0, 0.0, 2.0}}) {
            const auto a = build_schrodinger(laplacian_hops(1), periodic(values), {.selfadjoint = true});
            const auto sym = symbol_spectrum(laplacian_hops(1), values);
            const auto dir = direct_essential_estimate(a, {Window(Point{0}, 256)}, 0.1, 2, 0.05, Exec::serial);
            CHECK(hausdorff(sym.intervals, dir.intervals) <= 0.02);
        }
    }
}

TEST_SUITE("essential_spectrum_union") {
    TEST_CASE("free laplacian") {
        const auto ls = limits_of(laplacian_plus(decaying_gaussian(1.0, 3.0)));
        const auto es = essential_spectrum_union(ls, LambdaGrid::real(-1, 5, 0.01));
        REQUIRE(es.estimate.intervals.size() == 1);
        CHECK(hausdorff(es.estimate.intervals, iv({{0.0, 4.0}})) <= 0.01 + 1e-12);
    }

    TEST_CASE("two shifted bands merge") {
        const auto ls = limits_of(laplacian_plus(two_sided_tanh(1.0, 3.0, 2.0)));
        REQUIRE(ls.size() == 2);
        const auto es = essential_spectrum_union(ls, LambdaGrid::real(-1, 9, 0.01));
        REQUIRE(es.estimate.intervals.size() == 1);
        CHECK(oracle::sampled_hausdorff(pairs(es.estimate.intervals), {{1.0, 7.0}}, 0.001) <= 0.011);
    }

    TEST_CASE("separated bands stay apart") {
        const auto ls = limits_of(laplacian_plus(two_sided_tanh(0.0, 6.0, 2.0)));
        const auto es = essential_spectrum_union(ls, LambdaGrid::real(-1, 11, 0.01));
        REQUIRE(es.estimate.intervals.size() == 2);
        CHECK(hausdorff(es.estimate.intervals, iv({{0.0, 4.0}, {6.0, 10.0}})) <= 0.011);
    }

    TEST_CASE("shift covers the unit circle") {
        const auto a = build_schrodinger(shift_hops(), decaying_gaussian(cplx(0.5, 0.5), 3.0));
        const auto ls = limits_of(a);
        REQUIRE(ls.size() == 1);
        const auto es = essential_spectrum_union(ls, LambdaGrid::box(-1.5, 1.5, -1.5, 1.5, 0.05));
        CHECK(es.estimate.kind == EstimateKind::complex_cells);
        for (const auto& s : es.samples) {
            const double r = std::abs(s.lambda);
            if (std::abs(r - 1.0) >= 0.2) CHECK(!s.member);
            if (std::abs(r - 1.0) <= 0.02) CHECK(s.member);
        }
    }

    TEST_CASE("infinity limits add nothing and no-limit entries are rejected") {
        BuildOptions opts;
        opts.selfadjoint = true;
        opts.clamp_window = Window::centered(Point{0}, 101);
        const auto ramp = build_schrodinger(laplacian_hops(1), coercive_log(1.0), opts);
        const auto inf_limits = operator_spectrum_sample(ramp, {ray_sequence({1.0}, {100, 1000, 10000, 100000, 1000000})}, probe1);
        REQUIRE(inf_limits.size() == 1);
        REQUIRE(inf_limits[0].kind == LimitKind::infinity);
        CHECK(essential_spectrum_union(inf_limits, LambdaGrid::real(-1, 5, 0.01)).estimate.empty());

        LimitOperator nolimit;
        nolimit.kind = LimitKind::no_limit;
        CHECK_THROWS_AS(essential_spectrum_union({nolimit}, LambdaGrid::real(-1, 5, 0.01)), PreconditionError);
    }

    TEST_CASE("shift covariance") {
        const auto a = laplacian_plus(two_sided_tanh(0.0, 2.0, 3.0));
        const auto grid = LambdaGrid::real(-1, 7, 0.01);
        const auto e1 = essential_spectrum_union(limits_of(a), grid).estimate;
        const auto e2 = essential_spectrum_union(limits_of(translate(a, Point{37})), grid).estimate;
        REQUIRE(e1.intervals.size() == e2.intervals.size());
        for (std::size_t k = 0; k < e1.intervals.size(); ++k) {
            CHECK(e1.intervals[k].lo == e2.intervals[k].lo);
            CHECK(e1.intervals[k].hi == e2.intervals[k].hi);
        }
    }

    TEST_CASE("membership is a union of per-limit sets") {
        const auto ls = limits_of(laplacian_plus(two_sided_tanh(0.0, 6.0, 2.0)));
        const auto grid = LambdaGrid::real(-1, 11, 0.05);
        const auto all = essential_spectrum_union(ls, grid);
        const auto first = essential_spectrum_union({ls[0]}, grid), second = essential_spectrum_union({ls[1]}, grid);
        REQUIRE(all.samples.size() == first.samples.size());
        for (std::size_t k = 0; k < all.samples.size(); ++k)
            CHECK(all.samples[k].member == (first.samples[k].member || second.samples[k].member));
    }

    TEST_CASE("window route for a non-periodic limit; serial equals parallel") {
        // The well limit has no symbol, so the union sweeps windows.
        const auto w = limit_kernel(laplacian_hops(1), well(1.0, 0.5, 0.0, 2.0), true);
        LimitOperator l;
        l.kind = LimitKind::finite;
        l.op = w;
        l.symbol = well(1.0, 0.5, 0.0, 2.0);
        l.hop = laplacian_hops(1);
        l.id = "W";
        UnionOptions opts;
        opts.window_sides = {64, 128};
        const auto grid = LambdaGrid::real(-0.5, 3.0, 0.05);
        const auto s = essential_spectrum_union({l}, grid, opts, Exec::serial);
        const auto p = essential_spectrum_union({l}, grid, opts, Exec::parallel);
        CHECK(s.samples == p.samples);
        REQUIRE(!s.routes.empty());
        CHECK(s.routes[0].route == Route::window);
    }
}

TEST_SUITE("direct_essential_estimate") {
    TEST_CASE("laplacian plus decaying potential") {
        const auto a = laplacian_plus(decaying_inverse_square(2.0, 3.0));
        const auto e = direct_essential_estimate(a, {Window::centered(Point{50}, 64), Window::centered(Point{100}, 64)}, 0.1);
        CHECK(hausdorff(e.intervals, iv({{0.0, 4.0}})) <= 0.05);
    }

    TEST_CASE("identity") {
        const auto e = direct_essential_estimate(identity_kernel(1), {Window(Point{50}, 16)}, 0.1);
        REQUIRE(!e.intervals.empty());
        CHECK(hausdorff(e.intervals, iv({{1.0, 1.0}})) <= 1e-12);
    }

    TEST_CASE("non-self-adjoint input is refused") {
        CHECK_THROWS_AS(direct_essential_estimate(build_schrodinger(shift_hops(), constant_potential(0.0)),
                                                  {Window(Point{50}, 16)}),
                        PreconditionError);
    }
}

TEST_SUITE("fredholm_test") {
    TEST_CASE("outside and inside the laplacian band") {
        const auto ls = limits_of(laplacian_plus(decaying_gaussian(1.0, 3.0)));
        const auto out = fredholm_test(ls, -1.0);
        CHECK(out.fredholm);
        CHECK(out.sup_inverse_norm <= 1.0 + 1e-3);
        CHECK(out.sup_inverse_norm >= 1.0 - 1e-9);
        CHECK(!fredholm_test(ls, 2.0).fredholm);
    }

    TEST_CASE("bilateral shift at zero is invertible") {
        const auto ls = limits_of(build_schrodinger(shift_hops(), decaying_gaussian(cplx(0.5, 0.5), 3.0)));
        const auto v = fredholm_test(ls, 0.0);
        CHECK(v.fredholm);
        CHECK(v.sup_inverse_norm == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("verdict equals the per-limit tolerance test") {
        const auto ls = limits_of(laplacian_plus(two_sided_tanh(0.0, 6.0, 2.0)));
        UnionOptions opts;
        for (double lambda : {-0.5, 0.0, 2.0, 4.9, 5.0, 6.0, 11.0}) {
            const auto v = fredholm_test(ls, lambda, opts);
            bool all = true;
            for (const auto& e : v.per_limit) all = all && e.nu >= opts.tol && e.nu_adjoint >= opts.tol;
            CHECK(v.fredholm == all);
        }
    }

    TEST_CASE("dense inverse norm matches the lower norms on windows") {
        const auto w = limit_kernel(laplacian_hops(1), well(1.0, 0.5, 0.0, 2.0), true);
        LimitOperator l;
        l.kind = LimitKind::finite;
        l.op = w;
        l.symbol = well(1.0, 0.5, 0.0, 2.0);
        l.hop = laplacian_hops(1);
        l.id = "W";
        UnionOptions opts;
        opts.window_sides = {64, 128};
        for (double lambda : {-1.0, 0.3}) {
            const auto v = fredholm_test({l}, lambda, opts);
            REQUIRE(v.fredholm);
            Matrix m = compress(w, Window::centered(Point{0}, 128));
            m.diagonal().array() -= cplx(lambda);
            const double inv = oracle::gram_sigma_max(m.inverse());
            CHECK(inv <= 1.1 * v.sup_inverse_norm);
        }
    }
}

TEST_SUITE("intervals") {
    TEST_CASE("merge and hausdorff") {
        const auto m = merge_intervals({{3.0, 4.0}, {0.0, 1.0}, {1.04, 2.0}}, 0.05);
        REQUIRE(m.size() == 2);
        CHECK(m[0].lo == 0.0);
        CHECK(m[0].hi == 2.0);
        CHECK(hausdorff(m, iv({{0.0, 2.0}, {3.0, 4.0}})) == 0.0);
        CHECK(hausdorff(std::vector<Interval>{}, std::vector<Interval>{}) == 0.0);
        CHECK(std::isinf(hausdorff(m, std::vector<Interval>{})));
        CHECK(hausdorff(iv({{0.0, 1.0}}), iv({{0.0, 1.5}})) == doctest::Approx(0.5));
        CHECK(hausdorff(m, iv({{0.0, 4.0}})) ==
              doctest::Approx(oracle::sampled_hausdorff(pairs(m), {{0.0, 4.0}}, 1e-3)).epsilon(1e-3));
    }
}
