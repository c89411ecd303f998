#include "doctest.h"

#include <algorithm>
#include <random>

#include "limspec/resolvent.hpp"
#include "oracles.hpp"

using namespace limspec;

namespace {

Matrix diag12() {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 2.0;
    return h;
}

Matrix jordan0() {
    Matrix j = Matrix::Zero(2, 2);
    j(0, 1) = 1.0;
    return j;
}

Matrix random_hermitian(int n, std::mt19937_64& rng) {
    const Matrix m = oracle::random_matrix(n, n, rng);
    return (m + m.adjoint()) * 0.5;
}

std::vector<cplx> sorted_by_real(std::vector<cplx> v) {
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
    return v;
}

double set_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    // Hausdorff distance by brute force.
    auto directed = [](const std::vector<cplx>& p, const std::vector<cplx>& q) {
        double worst = 0.0;
        for (auto x : p) {
            double d = 1e300;
            for (auto y : q) d = std::min(d, std::abs(x - y));
            worst = std::max(worst, d);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace

TEST_SUITE("check_resolvent_identity") {
    const cplx i(0.0, 1.0);

    TEST_CASE("true resolvent of diag(1, 2)") {
        const auto r = PseudoResolvent::of_matrix(diag12(), {i, 2.0 * i, 1.0 + i}, i, true);
        const auto c = check_resolvent_identity(r, {{i, 2.0 * i}, {i, 1.0 + i}, {2.0 * i, 1.0 + i}}, 1e-10);
        CHECK(c.passed);
        CHECK(c.max_residual <= 1e-12);
    }

    TEST_CASE("zero pseudo-resolvent") {
        const auto r = PseudoResolvent::zero(3, {i, 2.0 * i}, i);
        CHECK(check_resolvent_identity(r, {{i, 2.0 * i}}, 1e-10).max_residual == 0.0);
    }

    TEST_CASE("noise is flagged") {
        auto r = PseudoResolvent::of_matrix(diag12(), {i, 2.0 * i, 1.0 + i}, i);
        std::mt19937_64 rng(3);
        const Matrix noise = oracle::random_matrix(2, 2, rng) * 1e-3;
        const auto exact = r.eval;
        r.eval = [exact, noise](cplx z) { return (exact(z) + (z == i ? noise : Matrix::Zero(2, 2))).eval(); };
        const auto c = check_resolvent_identity(r, {{i, 2.0 * i}, {i, 1.0 + i}}, 1e-10);
        CHECK(!c.passed);
        CHECK(c.max_residual >= 1e-4);
    }
}

TEST_SUITE("resolvent_spectrum_map") {
    const cplx i(0.0, 1.0);

    TEST_CASE("diag(1, 2) at a = i") {
        const auto r = PseudoResolvent::of_matrix(diag12(), {i}, i);
        const auto sp = sorted_by_real(resolvent_spectrum_map(r));
        REQUIRE(sp.size() == 2);
        CHECK(std::abs(sp[0] - cplx(1.0)) <= 1e-12);
        CHECK(std::abs(sp[1] - cplx(2.0)) <= 1e-12);
    }

    TEST_CASE("zero resolvent has empty spectrum") {
        CHECK(resolvent_spectrum_map(PseudoResolvent::zero(4, {i}, i)).empty());
    }

    TEST_CASE("jordan block at a = 1") {
        const auto r = PseudoResolvent::of_matrix(jordan0(), {1.0}, 1.0);
        const auto sp = resolvent_spectrum_map(r);
        REQUIRE(!sp.empty());
        for (auto z : sp) CHECK(std::abs(z) <= 1e-7);
    }

    TEST_CASE("random Hermitian round trip and base-point independence") {
        std::mt19937_64 rng(5);
        for (int k = 0; k < 20; ++k) {
            const int n = 1 + k % 12;
            const Matrix h = random_hermitian(n, rng);
            Eigen::SelfAdjointEigenSolver<Matrix> es(h);
            std::vector<cplx> exact;
            for (int j = 0; j < n; ++j) exact.push_back(es.eigenvalues()(j));
            const auto ra = PseudoResolvent::of_matrix(h, {3.0 * i}, 3.0 * i, true);
            const auto rb = PseudoResolvent::of_matrix(h, {-1.0 - 2.0 * i}, -1.0 - 2.0 * i, true);
            const auto sa = resolvent_spectrum_map(ra), sb = resolvent_spectrum_map(rb);
            CHECK(set_distance(sa, exact) <= 1e-8);
            CHECK(set_distance(sa, sb) <= 1e-8);
        }
    }
}

TEST_SUITE("is_regular") {
    TEST_CASE("hermitian resolvent tends to norm one") {
        std::mt19937_64 rng(9);
        const Matrix h = random_hermitian(6, rng);
        const auto r = PseudoResolvent::of_matrix(h, {cplx(0, 1)}, cplx(0, 1), true);
        const auto rep = is_regular(r);
        CHECK(rep.regular);
        REQUIRE(!rep.norms.empty());
        CHECK(rep.norms.back() == doctest::Approx(1.0).epsilon(1e-3));
    }

    TEST_CASE("zero resolvent is regular with sup zero") {
        const auto rep = is_regular(PseudoResolvent::zero(3, {cplx(0, 1)}, cplx(0, 1)));
        CHECK(rep.regular);
        CHECK(rep.sup_norm == 0.0);
    }

    TEST_CASE("jordan block is regular") {
        const auto rep = is_regular(PseudoResolvent::of_matrix(jordan0(), {cplx(0, 1)}, cplx(0, 1)));
        CHECK(rep.regular);
        CHECK(rep.norms.back() == doctest::Approx(1.0).epsilon(1e-2));
    }

    TEST_CASE("serial and parallel ladders agree") {
        const auto r = PseudoResolvent::of_matrix(diag12(), {cplx(0, 1)}, cplx(0, 1), true);
        CHECK(is_regular(r, default_ladder(), Exec::serial).norms == is_regular(r, default_ladder(), Exec::parallel).norms);
    }
}

TEST_SUITE("associated_operator") {
    const cplx i(0.0, 1.0);

    TEST_CASE("rank-one projection gives the identity on its range") {
        Vector u(3);
        u << 1.0, 2.0, cplx(0.0, 2.0);
        u /= u.norm();
        const Matrix p = u * u.adjoint();
        PseudoResolvent r;
        r.size = 3;
        r.base_point = i;
        r.sample_points = {i};
        r.selfadjoint = true;
        r.eval = [p](cplx z) { return (p / (1.0 - z)).eval(); };
        const auto op = associated_operator(r);
        CHECK(!op.infinity);
        REQUIRE(op.h.rows() == 1);
        CHECK(std::abs(op.h(0, 0) - cplx(1.0)) <= 1e-12);
        CHECK((op.full_matrix() - p).norm() <= 1e-12);
        CHECK(op.null_basis.cols() == 2);
        // Self-adjoint: kernel and range are orthogonal.
        CHECK((op.null_basis.adjoint() * op.range_basis).norm() <= 1e-10);
    }

    TEST_CASE("zero resolvent is the operator infinity") {
        CHECK(associated_operator(PseudoResolvent::zero(3, {i}, i)).infinity);
    }

    TEST_CASE("full resolvent of diag(1, 2) recovers it") {
        const auto op = associated_operator(PseudoResolvent::of_matrix(diag12(), {i}, i, true));
        CHECK(op.null_basis.cols() == 0);
        CHECK((op.full_matrix() - diag12()).norm() <= 1e-10);
    }

    TEST_CASE("random round trips, Hermitian and not") {
        std::mt19937_64 rng(13);
        for (int k = 0; k < 20; ++k) {
            const int n = 1 + k % 12;
            const Matrix h = k % 2 ? random_hermitian(n, rng) : oracle::random_matrix(n, n, rng);
            const cplx a(0.0, 5.0);
            const auto op = associated_operator(PseudoResolvent::of_matrix(h, {a}, a, k % 2 == 1));
            CHECK((op.full_matrix() - h).norm() <= 1e-9 * std::max(1.0, h.norm()));
            Matrix shifted_h = h;
            shifted_h.diagonal().array() -= cplx(1.0, 1.0);
            CHECK((op.resolvent(cplx(1.0, 1.0)) - shifted_h.inverse()).norm() <= 1e-9 * std::max(1.0, shifted_h.inverse().norm()));
        }
    }
}

TEST_SUITE("window resolvents and infinity") {
    TEST_CASE("linear growth drives the window resolvent to zero") {
        BuildOptions opts;
        opts.selfadjoint = true;
        opts.clamp_window = Window::centered(Point{0}, 101);
        const auto a = build_schrodinger(laplacian_hops(1), coercive_abs(1.0), opts);
        const Window w = Window::centered(Point{0}, 11);
        std::vector<double> norms;
        for (std::int64_t off : {20, 40, 80}) {
            const Matrix r = window_resolvent(translate_clamped(a, Point{off}, Window::centered(Point{0}, 15)), w, -1.0, 2);
            const double nrm = oracle::gram_sigma_max(r);
            // H >= min potential on the extended window = off - 7.
            CHECK(nrm <= 1.0 / static_cast<double>(off - 7 + 1) + 1e-12);
            norms.push_back(nrm);
        }
        const auto det = detect_infinity(norms, 0.1);
        CHECK(det.fired);
        CHECK(det.from_index == std::optional<std::size_t>(0));
    }

    TEST_CASE("free laplacian never fires") {
        const auto a = build_schrodinger(laplacian_hops(1), constant_potential(0.0), {.selfadjoint = true});
        const Window w = Window::centered(Point{0}, 11);
        std::vector<double> norms;
        for (std::int64_t off : {20, 40, 80}) norms.push_back(oracle::gram_sigma_max(window_resolvent(translate(a, Point{off}), w, -1.0, 20)));
        CHECK(norms.front() == doctest::Approx(norms.back()).epsilon(1e-12));
        CHECK(!detect_infinity(norms, 0.1).fired);
    }

    TEST_CASE("window resolvent matches the inverse of the extended compression") {
        const auto a = build_schrodinger(laplacian_hops(1), decaying_gaussian(1.0, 3.0), {.selfadjoint = true});
        const Window w(Point{-3}, 7);
        Matrix ext = compress(a, Window(Point{-8}, 17));
        ext.diagonal().array() -= cplx(-1.0);
        const Matrix inv = ext.inverse();
        CHECK((window_resolvent(a, w, -1.0, 5) - inv.block(5, 5, 7, 7)).norm() <= 1e-12);
    }

    TEST_CASE("detect_infinity needs the tail") {
        CHECK(!detect_infinity({0.05, 0.2}, 0.1).fired);
        const auto d = detect_infinity({0.5, 0.09, 0.05}, 0.1);
        CHECK(d.fired);
        CHECK(d.from_index == std::optional<std::size_t>(1));
    }
}
