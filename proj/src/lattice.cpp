#include "limspec/lattice.hpp"

#include <algorithm>
#include <sstream>

namespace limspec {

CapacityError::CapacityError(std::size_t rows, std::size_t cap)
    : Error("dense matrix with " + std::to_string(rows) + " rows exceeds the configured cap of " +
            std::to_string(cap) + " rows; required cap: " + std::to_string(rows)),
      required_cap(rows) {}

MarginError::MarginError(std::int64_t have, std::int64_t required)
    : Error("support region is " + std::to_string(have) +
            " sites from the window boundary; required margin: " + std::to_string(required)),
      required_margin(required) {}

WindowTooSmall::WindowTooSmall(std::int64_t side, std::int64_t min_side_)
    : Error("window side " + std::to_string(side) + " too small; minimum side: " +
            std::to_string(min_side_)),
      min_side(min_side_) {}

Point::Point(std::initializer_list<std::int64_t> coords) : dim(static_cast<int>(coords.size())) {
    if (dim < 1 || dim > max_dim) throw PreconditionError("point dimension must be in [1, 3]");
    std::copy(coords.begin(), coords.end(), c.begin());
}

Point Point::from_vector(const std::vector<std::int64_t>& coords) {
    if (coords.empty() || coords.size() > static_cast<std::size_t>(max_dim))
        throw PreconditionError("point dimension must be in [1, 3]");
    Point p(static_cast<int>(coords.size()));
    std::copy(coords.begin(), coords.end(), p.c.begin());
    return p;
}

std::vector<std::int64_t> Point::to_vector() const { return {c.begin(), c.begin() + dim}; }

std::string Point::str() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim; ++i) os << (i ? "," : "") << c[static_cast<std::size_t>(i)];
    os << ')';
    return os.str();
}

Point operator+(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a[i] += b[i];
    return a;
}

Point operator-(Point a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) a[i] -= b[i];
    return a;
}

Point operator-(Point a) {
    for (int i = 0; i < a.dim; ++i) a[i] = -a[i];
    return a;
}

bool operator==(const Point& a, const Point& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i)
        if (a[i] != b[i]) return false;
    return true;
}

bool operator<(const Point& a, const Point& b) {
    for (int i = 0; i < std::min(a.dim, b.dim); ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return a.dim < b.dim;
}

std::int64_t norm_inf(const Point& p) {
    std::int64_t m = 0;
    for (int i = 0; i < p.dim; ++i) m = std::max(m, p[i] < 0 ? -p[i] : p[i]);
    return m;
}

Point zero_point(int dim) { return Point(dim); }

Point scaled(const Point& p, std::int64_t k) {
    Point q = p;
    for (int i = 0; i < q.dim; ++i) q[i] *= k;
    return q;
}

std::size_t PointHash::operator()(const Point& p) const noexcept {
    std::size_t h = static_cast<std::size_t>(p.dim);
    for (int i = 0; i < p.dim; ++i)
        h ^= std::hash<std::int64_t>{}(p[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

Window::Window(Point offset_, std::int64_t side_, std::int64_t margin_)
    : offset(offset_), side(side_), margin(margin_) {
    if (side < 1) throw PreconditionError("window side must be positive");
    if (margin < 0) throw PreconditionError("window margin must be nonnegative");
    if (margin > 0 && side <= 2 * margin)
        throw PreconditionError("window side must exceed twice its margin");
}

Window Window::centered(const Point& center, std::int64_t side, std::int64_t margin) {
    Point o = center;
    for (int i = 0; i < o.dim; ++i) o[i] -= side / 2;
    return Window(o, side, margin);
}

std::size_t Window::size() const {
    std::size_t n = 1;
    for (int i = 0; i < dim(); ++i) n *= static_cast<std::size_t>(side);
    return n;
}

bool Window::contains(const Point& p) const {
    for (int i = 0; i < dim(); ++i) {
        const auto rel = p[i] - offset[i];
        if (rel < 0 || rel >= side) return false;
    }
    return true;
}

std::int64_t Window::depth(const Point& p) const {
    if (!contains(p)) return 0;
    std::int64_t d = side;
    for (int i = 0; i < dim(); ++i) {
        const auto rel = p[i] - offset[i];
        d = std::min({d, rel + 1, side - rel});
    }
    return d;
}

bool Window::in_interior(const Point& p) const { return depth(p) > margin; }

std::size_t Window::index_of(const Point& p) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i)
        idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(p[i] - offset[i]);
    return idx;
}

Point Window::point_at(std::size_t index) const {
    Point p(dim());
    for (int i = dim() - 1; i >= 0; --i) {
        p[i] = offset[i] + static_cast<std::int64_t>(index % static_cast<std::size_t>(side));
        index /= static_cast<std::size_t>(side);
    }
    return p;
}

std::vector<Point> Window::points() const {
    std::vector<Point> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point_at(i));
    return out;
}

std::vector<Point> Window::interior_points() const {
    std::vector<Point> out;
    for (std::size_t i = 0; i < size(); ++i) {
        auto p = point_at(i);
        if (in_interior(p)) out.push_back(p);
    }
    return out;
}

Point Window::center() const {
    Point p = offset;
    for (int i = 0; i < dim(); ++i) p[i] += side / 2;
    return p;
}

std::vector<Point> ball(const Point& p, std::int64_t r) {
    Point o = p;
    for (int i = 0; i < o.dim; ++i) o[i] -= r;
    return Window(o, 2 * r + 1).points();
}

std::vector<Point> expand(const std::vector<Point>& pts, std::int64_t r) {
    if (pts.empty()) return {};
    if (r == 0) {
        auto out = pts;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    // Bounding box, then mark.
    const int d = pts.front().dim;
    Point lo = pts.front(), hi = pts.front();
    for (const auto& p : pts)
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    std::int64_t side = 0;
    for (int i = 0; i < d; ++i) side = std::max(side, hi[i] - lo[i] + 1 + 2 * r);
    for (int i = 0; i < d; ++i) lo[i] -= r;
    const Window box(lo, side);
    std::vector<char> mark(box.size(), 0);
    const auto offsets = ball(zero_point(d), r);
    for (const auto& p : pts)
        for (const auto& o : offsets) mark[box.index_of(p + o)] = 1;
    std::vector<Point> out;
    for (std::size_t i = 0; i < mark.size(); ++i)
        if (mark[i]) out.push_back(box.point_at(i));
    return out;
}

std::int64_t diameter(const std::vector<Point>& pts) {
    if (pts.empty()) return -1;
    const int d = pts.front().dim;
    std::int64_t diam = 0;
    for (int i = 0; i < d; ++i) {
        std::int64_t lo = pts.front()[i], hi = lo;
        for (const auto& p : pts) {
            lo = std::min(lo, p[i]);
            hi = std::max(hi, p[i]);
        }
        diam = std::max(diam, hi - lo);
    }
    return diam;
}

}  // namespace limspec
