#include "limspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace limspec::linalg {

double largest_singular_value(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double smallest_singular_value_dense(const Matrix& m) {
    if (m.cols() == 0) return std::numeric_limits<double>::infinity();
    if (m.rows() < m.cols()) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

BandedHermitian::BandedHermitian(std::size_t n, std::size_t bandwidth)
    : n_(n), b_(std::min(bandwidth, n == 0 ? 0 : n - 1)), lower_(n * (b_ + 1)) {}

std::size_t BandedHermitian::count_below(double shift) const {
    // LDL^H without pivoting; D is real. Zero pivots are nudged, as in the
    // classical Sturm count.
    const std::size_t w = b_ + 1;
    std::vector<cplx> l(n_ * w);  // l[j*w + k] = L(j + k, j)
    std::vector<double> d(n_);
    const double tiny = std::numeric_limits<double>::min() * 1e10 * (1.0 + std::abs(shift));
    std::size_t negatives = 0;
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t k0 = j > b_ ? j - b_ : 0;
        double dj = at(j, j).real() - shift;
        for (std::size_t k = k0; k < j; ++k) dj -= std::norm(l[k * w + (j - k)]) * d[k];
        if (std::abs(dj) < tiny) dj = -tiny;
        d[j] = dj;
        if (dj < 0) ++negatives;
        const std::size_t iend = std::min(n_ - 1, j + b_);
        for (std::size_t i = j + 1; i <= iend; ++i) {
            cplx s = at(i, j);
            const std::size_t kk0 = i > b_ ? i - b_ : 0;
            for (std::size_t k = std::max(k0, kk0); k < j; ++k)
                s -= l[k * w + (i - k)] * std::conj(l[k * w + (j - k)]) * d[k];
            l[j * w + (i - j)] = s / dj;
        }
    }
    return negatives;
}

double BandedHermitian::gershgorin_upper() const {
    double best = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double row = at(i, i).real();
        const std::size_t lo = i > b_ ? i - b_ : 0;
        const std::size_t hi = std::min(n_ - 1, i + b_);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            row += std::abs(j < i ? at(i, j) : at(j, i));
        }
        best = std::max(best, row);
    }
    return best;
}

Matrix BandedHermitian::to_dense() const {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t i = j; i <= std::min(n_ - 1, j + b_); ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = at(i, j);
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(at(i, j));
        }
    return m;
}

BandedHermitian gram_banded(const std::vector<SparseColumn>& cols, std::size_t bandwidth) {
    BandedHermitian g(cols.size(), bandwidth);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const std::size_t iend = std::min(cols.size() - 1, j + g.bandwidth());
        for (std::size_t i = j; i <= iend; ++i) {
            // <col_i, col_j> with both columns sorted by row index.
            cplx s{};
            auto a = cols[i].begin();
            auto b = cols[j].begin();
            while (a != cols[i].end() && b != cols[j].end()) {
                if (a->first < b->first) {
                    ++a;
                } else if (b->first < a->first) {
                    ++b;
                } else {
                    s += std::conj(a->second) * b->second;
                    ++a;
                    ++b;
                }
            }
            g.at(i, j) = s;
        }
    }
    return g;
}

double smallest_singular_value_banded(const BandedHermitian& gram, const BisectionOptions& opts) {
    if (gram.size() == 0) return std::numeric_limits<double>::infinity();
    double lo = 0.0;
    double hi = std::sqrt(std::max(gram.gershgorin_upper(), 0.0)) * (1.0 + 1e-12) + 1e-300;
    if (gram.count_below(0.0) > 0) return 0.0;  // only from rounding; G is PSD
    while (hi - lo > std::max(opts.abs_tol, opts.rel_tol * hi)) {
        const double mid = 0.5 * (lo + hi);
        if (gram.count_below(mid * mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

bool smallest_singular_value_below(const BandedHermitian& gram, double threshold) {
    if (gram.size() == 0) return false;
    return gram.count_below(threshold * threshold) > 0;
}

}  // namespace limspec::linalg
