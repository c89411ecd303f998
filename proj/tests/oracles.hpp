#pragma once

// Reference computations that share no code with the library: explicit loops,
// closed forms and eigen-decompositions of Gram matrices in place of SVDs.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Tridiagonal (2, -1) matrix of size n: the Dirichlet Laplacian on n sites.
inline Mat dirichlet_laplacian(int n) {
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0;
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = -1.0;
    }
    return m;
}

/// 2 - 2 cos(k pi / (n + 1)), k = 1..n, ascending.
inline std::vector<double> dirichlet_eigenvalues(int n) {
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) out.push_back(2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1)));
    return out;
}

/// Smallest singular value from the eigenvalues of M^H M.
inline double gram_sigma_min(const Mat& m) {
    if (m.cols() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Mat> es(m.adjoint() * m);
    return std::sqrt(std::max(0.0, es.eigenvalues()(0)));
}

/// Largest singular value from the eigenvalues of M^H M.
inline double gram_sigma_max(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(m.adjoint() * m);
    return std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
}

/// min over a dense grid of unit vectors in C^n (n <= 2 complex coordinates,
/// parametrized by angle and relative phase) of |M u|.
inline double brute_sigma_min_2(const Mat& m, int steps) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= steps; ++a) {
        const double t = 0.5 * std::numbers::pi * a / steps;
        for (int b = 0; b < 4 * steps; ++b) {
            const double ph = 2.0 * std::numbers::pi * b / (4 * steps);
            Eigen::VectorXcd u(2);
            u << std::cos(t), std::sin(t) * std::polar(1.0, ph);
            best = std::min(best, (m * u).norm());
        }
    }
    return best;
}

/// Band edges of the period-2 Laplacian with potential (p0, p1): eigenvalues
/// of [[2 + p0, -(1 + e^{-ik})], [-(1 + e^{ik}), 2 + p1]], closed form over k.
/// Returns {lower band lo, lower band hi, upper band lo, upper band hi}.
inline std::array<double, 4> dimer_band_edges(double p0, double p1) {
    const double mean = 2.0 + 0.5 * (p0 + p1);
    const double half_gap = 0.5 * (p1 - p0);
    // |1 + e^{ik}|^2 ranges over [0, 4].
    const double s_lo = std::abs(half_gap);
    const double s_hi = std::sqrt(half_gap * half_gap + 4.0);
    return {mean - s_hi, mean - s_lo, mean + s_lo, mean + s_hi};
}

/// Dirichlet Green function of 2 - S - S^* - z on {0, 1, ...} for real z < 0:
/// (rho^{|x-y|} - rho^{x+y+2}) / (1/rho - rho), rho + 1/rho = 2 - z, 0 < rho < 1.
inline double half_line_green(std::int64_t x, std::int64_t y, double z) {
    const double s = 2.0 - z;
    const double rho = 0.5 * (s - std::sqrt(s * s - 4.0));
    const double d = 1.0 / rho - rho;
    return (std::pow(rho, static_cast<double>(std::llabs(x - y))) - std::pow(rho, static_cast<double>(x + y + 2))) / d;
}

/// Hausdorff distance between unions of closed intervals, by dense sampling
/// of both sets at the given step (exact up to step / 2).
inline double sampled_hausdorff(const std::vector<std::pair<double, double>>& a,
                                const std::vector<std::pair<double, double>>& b, double step) {
    auto sample = [step](const std::vector<std::pair<double, double>>& s) {
        std::vector<double> pts;
        for (auto [lo, hi] : s) {
            for (double x = lo; x < hi; x += step) pts.push_back(x);
            pts.push_back(hi);
        }
        return pts;
    };
    auto directed = [](const std::vector<double>& p, const std::vector<std::pair<double, double>>& s) {
        double worst = 0.0;
        for (double x : p) {
            double d = std::numeric_limits<double>::infinity();
            for (auto [lo, hi] : s) d = std::min(d, x < lo ? lo - x : (x > hi ? x - hi : 0.0));
            worst = std::max(worst, d);
        }
        return worst;
    };
    return std::max(directed(sample(a), b), directed(sample(b), a));
}

/// Random complex matrix with entries uniform in the unit square.
inline Mat random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(u(rng), u(rng));
    return m;
}

}  // namespace oracle
