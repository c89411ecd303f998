#include "limspec/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "limspec/linalg.hpp"

namespace limspec {

namespace {

constexpr double singular_threshold = 1e-10;

Matrix identity(std::size_t n) {
    return Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

}  // namespace

PseudoResolvent PseudoResolvent::of_matrix(const Matrix& h, std::vector<cplx> points, cplx base, bool selfadjoint) {
    if (h.rows() != h.cols()) throw PreconditionError("resolvent of a non-square matrix");
    PseudoResolvent r;
    r.sample_points = std::move(points);
    r.base_point = base;
    r.selfadjoint = selfadjoint;
    r.size = static_cast<std::size_t>(h.rows());
    r.eval = [h](cplx z) {
        Matrix m = h;
        m.diagonal().array() -= z;
        Eigen::PartialPivLU<Matrix> lu(m);
        return Matrix(lu.inverse());
    };
    return r;
}

PseudoResolvent PseudoResolvent::zero(std::size_t n, std::vector<cplx> points, cplx base) {
    PseudoResolvent r;
    r.sample_points = std::move(points);
    r.base_point = base;
    r.selfadjoint = true;
    r.size = n;
    r.eval = [n](cplx) { return Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).eval(); };
    return r;
}

Matrix PseudoResolvent::transfer(cplx z) const { return identity(size) - (z - base_point) * eval(base_point); }

Matrix PseudoResolvent::extended(cplx z) const {
    const Matrix t = transfer(z);
    const double smin = linalg::smallest_singular_value_dense(t);
    if (smin < singular_threshold)
        throw NumericalError("R_za is numerically singular at z = (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + "), sigma_min = " + std::to_string(smin));
    // R(a) R_za^{-1} = (R_za^{-T} R(a)^T)^T; solve with the transfer matrix directly.
    return t.transpose().partialPivLu().solve(eval(base_point).transpose()).transpose();
}

IdentityCheck check_resolvent_identity(const PseudoResolvent& r, const std::vector<std::pair<cplx, cplx>>& pairs,
                                       double tol, Exec exec) {
    std::vector<double> res(pairs.size(), 0.0);
    parallel_for(
        pairs.size(),
        [&](std::size_t k) {
            const auto [a, b] = pairs[k];
            const Matrix ra = r.eval(a);
            const Matrix rb = r.eval(b);
            res[k] = (ra - rb - (a - b) * ra * rb).norm();
        },
        exec);
    IdentityCheck out;
    out.tol = tol;
    for (double v : res) out.max_residual = std::max(out.max_residual, v);
    out.passed = out.max_residual <= tol;
    return out;
}

std::vector<cplx> resolvent_spectrum_map(const PseudoResolvent& r, double zero_tol) {
    const Matrix ra = r.eval(r.base_point);
    if (ra.size() == 0) return {};
    const double scale = linalg::largest_singular_value(ra);
    if (scale == 0.0) return {};
    Eigen::ComplexEigenSolver<Matrix> es(ra, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on R(a)");
    std::vector<cplx> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx mu = es.eigenvalues()(i);
        if (std::abs(mu) > zero_tol * scale) out.push_back(r.base_point + 1.0 / mu);
    }
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return out;
}

std::vector<cplx> default_ladder() {
    std::vector<cplx> z;
    for (int n = 1; n <= 12; ++n) z.emplace_back(0.0, std::ldexp(1.0, n));
    return z;
}

RegularityReport is_regular(const PseudoResolvent& r, const std::vector<cplx>& ladder, Exec exec) {
    std::vector<double> norms(ladder.size(), -1.0);
    parallel_for(
        ladder.size(),
        [&](std::size_t k) {
            try {
                norms[k] = std::abs(ladder[k]) * linalg::largest_singular_value(r.extended(ladder[k]));
            } catch (const NumericalError&) {
                norms[k] = -1.0;
            }
        },
        exec);
    RegularityReport rep;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (norms[k] < 0.0) {
            rep.skipped.push_back(k);
            continue;
        }
        rep.norms.push_back(norms[k]);
        rep.sup_norm = std::max(rep.sup_norm, norms[k]);
    }
    if (rep.norms.size() >= 2) {
        const double last = rep.norms.back();
        const double prev = rep.norms[rep.norms.size() - 2];
        rep.regular = last <= 1.05 * prev || last == 0.0;
    }
    return rep;
}

Matrix AssociatedOperator::full_matrix() const {
    const auto n = range_basis.rows();
    if (infinity) return Matrix::Zero(n, n);
    Matrix q(n, n);
    q << range_basis, null_basis;
    const Matrix qinv = q.partialPivLu().inverse();
    return range_basis * h * qinv.topRows(range_basis.cols());
}

Matrix AssociatedOperator::resolvent(cplx z) const {
    const auto n = range_basis.rows();
    if (infinity || range_basis.cols() == 0) return Matrix::Zero(n, n);
    Matrix q(n, n);
    q << range_basis, null_basis;
    const Matrix qinv = q.partialPivLu().inverse();
    Matrix hz = h;
    hz.diagonal().array() -= z;
    return range_basis * hz.partialPivLu().inverse() * qinv.topRows(range_basis.cols());
}

AssociatedOperator associated_operator(const PseudoResolvent& r, double rank_tol, double condition_tol) {
    const Matrix ra = r.eval(r.base_point);
    const auto n = ra.rows();
    AssociatedOperator out;
    out.base_point = r.base_point;
    Eigen::JacobiSVD<Matrix> svd(ra, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = n > 0 ? s(0) : 0.0;
    Eigen::Index k = 0;
    while (k < s.size() && s(k) > rank_tol * std::max(smax, 1.0)) ++k;
    out.range_basis = svd.matrixU().leftCols(k);
    out.null_basis = svd.matrixV().rightCols(n - k);
    if (k == 0) {
        out.infinity = true;
        out.decomposition_sigma_min = 1.0;
        out.h = Matrix(0, 0);
        return out;
    }
    Matrix q(n, n);
    q << out.range_basis, out.null_basis;
    out.decomposition_sigma_min = linalg::smallest_singular_value_dense(q);
    if (out.decomposition_sigma_min < condition_tol)
        throw NumericalError("range and kernel of R(a) are not complementary: sigma_min([H_R, N_R]) = " +
                             std::to_string(out.decomposition_sigma_min));
    // ran R(a) = H_R, so R(a) U = U C with C = U^* R(a) U invertible.
    const Matrix c = out.range_basis.adjoint() * ra * out.range_basis;
    Matrix h = c.partialPivLu().inverse();
    h.diagonal().array() += r.base_point;
    out.h = h;
    return out;
}

Matrix window_resolvent(const LatticeKernel& a, const Window& w, cplx z, std::int64_t margin, std::size_t cap) {
    if (margin < 0) throw PreconditionError("window_resolvent: negative margin");
    Point o = w.offset;
    for (int i = 0; i < o.dim; ++i) o[i] -= margin;
    const Window ext(o, w.side + 2 * margin);
    const auto pts = ext.points();
    std::vector<std::size_t> on;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (a.on_carrier(pts[i])) on.push_back(i);
    std::vector<Point> carrier_pts;
    carrier_pts.reserve(on.size());
    for (auto i : on) carrier_pts.push_back(pts[i]);
    Matrix m = restrict_to(a, carrier_pts, carrier_pts, cap);
    m.diagonal().array() -= z;
    const Matrix inv = m.partialPivLu().inverse();

    const auto n = static_cast<Eigen::Index>(w.size());
    Matrix out = Matrix::Zero(n, n);
    std::vector<Eigen::Index> inner(on.size(), -1);
    for (std::size_t k = 0; k < on.size(); ++k)
        if (w.contains(pts[on[k]])) inner[k] = static_cast<Eigen::Index>(w.index_of(pts[on[k]]));
    for (std::size_t j = 0; j < on.size(); ++j) {
        if (inner[j] < 0) continue;
        for (std::size_t i = 0; i < on.size(); ++i)
            if (inner[i] >= 0)
                out(inner[i], inner[j]) = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return out;
}

InfinityDetection detect_infinity(const std::vector<double>& norms, double tol) {
    InfinityDetection d;
    d.norms = norms;
    d.tol = tol;
    if (norms.empty() || norms.back() > tol) return d;
    std::size_t k = norms.size();
    while (k > 0 && norms[k - 1] <= tol) --k;
    d.fired = true;
    d.from_index = k;
    return d;
}

}  // namespace limspec
