#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace limspec {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr int max_dim = 3;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense materialization refused: the requested matrix exceeds the row cap.
class CapacityError : public Error {
public:
    CapacityError(std::size_t rows, std::size_t cap);
    std::size_t required_cap;
};

/// A support region sits too close to its window boundary for an operator
/// of the given bandwidth.
class MarginError : public Error {
public:
    MarginError(std::int64_t have, std::int64_t required);
    std::int64_t required_margin;
};

/// A window is too small for the requested probe radius.
class WindowTooSmall : public Error {
public:
    WindowTooSmall(std::int64_t side, std::int64_t min_side);
    std::int64_t min_side;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Lattice points
// ---------------------------------------------------------------------------

struct Point {
    std::array<std::int64_t, max_dim> c{};
    int dim = 1;

    Point() = default;
    explicit Point(int d) : dim(d) {}
    Point(std::initializer_list<std::int64_t> coords);
    static Point from_vector(const std::vector<std::int64_t>& coords);

    std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    std::vector<std::int64_t> to_vector() const;
    std::string str() const;

    friend Point operator+(Point a, const Point& b);
    friend Point operator-(Point a, const Point& b);
    friend Point operator-(Point a);
    friend bool operator==(const Point& a, const Point& b);
    friend bool operator<(const Point& a, const Point& b);  // lexicographic
};

std::int64_t norm_inf(const Point& p);
Point zero_point(int dim);
Point scaled(const Point& p, std::int64_t k);

struct PointHash {
    std::size_t operator()(const Point& p) const noexcept;
};

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

/// Finite lattice box {offset + i : 0 <= i_k < side}. Points are enumerated
/// in lexicographic order (first coordinate most significant).
struct Window {
    Point offset;
    std::int64_t side = 1;
    std::int64_t margin = 0;

    Window() = default;
    Window(Point offset, std::int64_t side, std::int64_t margin = 0);

    /// Box of the given side whose centre is (as close as possible to) `center`.
    static Window centered(const Point& center, std::int64_t side, std::int64_t margin = 0);

    int dim() const { return offset.dim; }
    std::size_t size() const;
    bool contains(const Point& p) const;
    /// Points at distance >= margin from the complement.
    bool in_interior(const Point& p) const;
    /// Lattice distance from p to the complement of the window (0 outside).
    std::int64_t depth(const Point& p) const;

    std::size_t index_of(const Point& p) const;
    Point point_at(std::size_t index) const;
    std::vector<Point> points() const;
    std::vector<Point> interior_points() const;
    Point center() const;
};

/// All points q with |q - p|_inf <= r, lexicographic order.
std::vector<Point> ball(const Point& p, std::int64_t r);

/// Sorted, deduplicated union of the r-neighbourhoods of `pts`.
std::vector<Point> expand(const std::vector<Point>& pts, std::int64_t r);

/// ∞-metric diameter of a finite point set (0 for a single point, -1 for empty).
std::int64_t diameter(const std::vector<Point>& pts);

}  // namespace limspec
