#include "limspec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace limspec {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double plateau_value(const symbol::Plateau& p, std::int64_t x) {
    if (x < 0) return p.negative_value;
    // Largest m with m^2 - m <= x.
    auto m = static_cast<std::int64_t>(std::floor((1.0 + std::sqrt(1.0 + 4.0 * static_cast<double>(x))) / 2.0));
    while (m * m - m > x) --m;
    while ((m + 1) * (m + 1) - (m + 1) <= x) ++m;
    return x < m * m ? static_cast<double>(m) : 0.0;
}

double project(const std::vector<std::int64_t>& row, const Point& x) {
    double s = 0.0;
    for (int i = 0; i < x.dim && i < static_cast<int>(row.size()); ++i)
        s += static_cast<double>(row[static_cast<std::size_t>(i)] * x[i]);
    return s;
}

Point project_point(const symbol::SeparableTerm& t, const Point& x) {
    Point q(static_cast<int>(t.projection.size()));
    for (std::size_t k = 0; k < t.projection.size(); ++k)
        q[static_cast<int>(k)] = static_cast<std::int64_t>(project(t.projection[k], x));
    return q;
}

double window_extent(const Window& w) {
    double m = 0.0;
    for (int i = 0; i < w.dim(); ++i)
        m = std::max({m, std::abs(static_cast<double>(w.offset[i])),
                      std::abs(static_cast<double>(w.offset[i] + w.side - 1))});
    return m;
}

}  // namespace

PotentialSymbol constant_potential(cplx value, int dim) { return {symbol::Constant{value}, dim}; }

PotentialSymbol decaying_inverse_square(cplx amplitude, double scale, int dim) {
    symbol::Decaying d;
    d.rule = [amplitude, scale](const Point& x) {
        const double r = static_cast<double>(norm_inf(x)) / scale;
        return amplitude / (1.0 + r * r);
    };
    const double a = std::abs(amplitude);
    d.envelope = [a, scale](double r) { return a / (1.0 + (r / scale) * (r / scale)); };
    d.sup_abs = a;
    std::ostringstream os;
    os << "inverse_square(amp=" << amplitude << ",scale=" << scale << ")";
    d.name = os.str();
    return {d, dim};
}

PotentialSymbol decaying_gaussian(cplx amplitude, double width, int dim) {
    symbol::Decaying d;
    d.rule = [amplitude, width](const Point& x) {
        double r2 = 0.0;
        for (int i = 0; i < x.dim; ++i) r2 += static_cast<double>(x[i]) * static_cast<double>(x[i]);
        return amplitude * std::exp(-r2 / (width * width));
    };
    const double a = std::abs(amplitude);
    d.envelope = [a, width](double r) { return a * std::exp(-(r * r) / (width * width)); };
    d.sup_abs = a;
    std::ostringstream os;
    os << "gaussian(amp=" << amplitude << ",width=" << width << ")";
    d.name = os.str();
    return {d, dim};
}

PotentialSymbol decaying_bump(cplx amplitude, std::int64_t radius, int dim) {
    symbol::Decaying d;
    d.rule = [amplitude, radius](const Point& x) { return norm_inf(x) <= radius ? amplitude : cplx{}; };
    const double a = std::abs(amplitude);
    d.envelope = [a, radius](double r) { return r <= static_cast<double>(radius) ? a : 0.0; };
    d.sup_abs = a;
    std::ostringstream os;
    os << "bump(amp=" << amplitude << ",radius=" << radius << ")";
    d.name = os.str();
    return {d, dim};
}

PotentialSymbol two_sided_tanh(double c_minus, double c_plus, double width) {
    symbol::TwoSidedLimits t;
    t.c_minus = c_minus;
    t.c_plus = c_plus;
    t.rule = [=](double x) { return c_minus + (c_plus - c_minus) * 0.5 * (1.0 + std::tanh(x / width)); };
    // |tanh(s) -/+ 1| <= 2 exp(-2|s|)
    t.envelope = [=](double r) { return std::abs(c_plus - c_minus) * std::exp(-2.0 * r / width); };
    std::ostringstream os;
    os << "tanh(c-=" << c_minus << ",c+=" << c_plus << ",width=" << width << ")";
    t.name = os.str();
    return {t, 1};
}

PotentialSymbol plateau(double negative_value) {
    if (negative_value < 0) throw PreconditionError("plateau: value on x < 0 must be nonnegative");
    return {symbol::Plateau{negative_value}, 1};
}

PotentialSymbol modulated_power(double a, double theta, double lambda, double mu) {
    if (a < 0) throw PreconditionError("modulated_power: a must be >= 0");
    if (!(theta > 0 && theta < 1)) throw PreconditionError("modulated_power: theta must lie in (0,1)");
    if (!(lambda > 0 && mu > 0)) throw PreconditionError("modulated_power: lambda and mu must be positive");
    symbol::ModulatedPower m{a, theta, lambda, mu, {}};
    m.omega = [lambda, mu](double t) {
        // Reduce to [-1/2, 1/2] first; t can be ~1e8 in far windows.
        const double f = t - std::round(t);
        return lambda * std::pow(std::abs(std::sin(std::numbers::pi * f) / std::numbers::pi), mu);
    };
    return {m, 1};
}

PotentialSymbol affine_ramp(double slope) { return {symbol::AffineRamp{slope}, 1}; }

PotentialSymbol oscillatory_phase() { return {symbol::OscillatoryPhase{}, 1}; }

PotentialSymbol coercive_log(double scale, int dim) {
    return {symbol::Coercive{[scale](double r) { return scale * std::log1p(r); }, "log1p"}, dim};
}

PotentialSymbol coercive_abs(double scale, int dim) {
    return {symbol::Coercive{[scale](double r) { return scale * r; }, "abs"}, dim};
}

PotentialSymbol periodic(std::vector<cplx> values) {
    if (values.empty()) throw PreconditionError("periodic potential needs at least one value");
    return {symbol::Periodic{std::move(values)}, 1};
}

PotentialSymbol wall() { return {symbol::Wall{}, 1}; }

PotentialSymbol well(double lambda, double theta, double c, double mu) {
    return {symbol::Well{lambda, theta, c, mu}, 1};
}

PotentialSymbol separable(int dim, std::vector<symbol::SeparableTerm> terms) {
    for (const auto& t : terms) {
        if (!t.sub) throw PreconditionError("separable term without sub-symbol");
        if (static_cast<int>(t.projection.size()) != t.sub->dim)
            throw PreconditionError("separable term: projection rows must match sub-symbol dimension");
        for (const auto& row : t.projection)
            if (static_cast<int>(row.size()) != dim)
                throw PreconditionError("separable term: projection columns must match lattice dimension");
    }
    return {symbol::Separable{std::move(terms)}, dim};
}

symbol::SeparableTerm separable_term(std::vector<std::vector<std::int64_t>> projection, PotentialSymbol sub) {
    return {std::move(projection), std::make_shared<const PotentialSymbol>(std::move(sub))};
}

double evaluate_real(const symbol::ModulatedPower& m, double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return m.a == 0.0 ? m.omega(0.0) : 0.0;
    return std::pow(ax, m.a) * m.omega(std::pow(ax, m.theta));
}

cplx evaluate(const PotentialSymbol& sym, const Point& x) {
    return std::visit(
        overloaded{
            [](const symbol::Constant& c) { return c.value; },
            [&](const symbol::Decaying& d) { return d.rule(x); },
            [&](const symbol::TwoSidedLimits& t) { return cplx{t.rule(static_cast<double>(x[0]))}; },
            [&](const symbol::Plateau& p) { return cplx{plateau_value(p, x[0])}; },
            [&](const symbol::ModulatedPower& m) { return cplx{evaluate_real(m, static_cast<double>(x[0]))}; },
            [&](const symbol::AffineRamp& r) { return cplx{r.slope * static_cast<double>(x[0])}; },
            [&](const symbol::OscillatoryPhase&) {
                // exact while x^2 < 2^53
                const auto xi = x[0];
                const double phase = std::fmod(static_cast<double>(xi) * static_cast<double>(xi),
                                               2.0 * std::numbers::pi);
                return std::polar(1.0, phase);
            },
            [&](const symbol::Coercive& c) { return cplx{c.radial(static_cast<double>(norm_inf(x)))}; },
            [&](const symbol::Periodic& p) {
                const auto n = static_cast<std::int64_t>(p.values.size());
                return p.values[static_cast<std::size_t>(((x[0] % n) + n) % n)];
            },
            [&](const symbol::Wall&) { return x[0] >= 0 ? cplx{} : cplx{inf}; },
            [&](const symbol::Well& w) {
                return cplx{w.lambda * std::pow(std::abs(w.theta * static_cast<double>(x[0]) + w.c), w.mu)};
            },
            [&](const symbol::Separable& s) {
                cplx sum{};
                for (const auto& t : s.terms) sum += evaluate(*t.sub, project_point(t, x));
                return sum;
            }},
        sym.v);
}

bool is_unbounded(const PotentialSymbol& sym) {
    return std::visit(
        overloaded{[](const symbol::Plateau&) { return true; },
                   [](const symbol::ModulatedPower& m) { return m.a > 0; },
                   [](const symbol::AffineRamp& r) { return r.slope != 0.0; },
                   [](const symbol::Coercive&) { return true; },
                   [](const symbol::Wall&) { return true; },
                   [](const symbol::Well&) { return true; },
                   [](const symbol::Separable& s) {
                       return std::any_of(s.terms.begin(), s.terms.end(),
                                          [](const auto& t) { return is_unbounded(*t.sub); });
                   },
                   [](const auto&) { return false; }},
        sym.v);
}

bool is_real(const PotentialSymbol& sym) {
    return std::visit(
        overloaded{[](const symbol::Constant& c) { return c.value.imag() == 0.0; },
                   [](const symbol::Decaying& d) {
                       // Sampled: the named shapes carry a constant phase.
                       for (std::int64_t x = -3; x <= 3; ++x) {
                           Point p(1);
                           p[0] = x;
                           if (d.rule(p).imag() != 0.0) return false;
                       }
                       return true;
                   },
                   [](const symbol::OscillatoryPhase&) { return false; },
                   [](const symbol::Periodic& p) {
                       return std::all_of(p.values.begin(), p.values.end(),
                                          [](cplx v) { return v.imag() == 0.0; });
                   },
                   [](const symbol::Separable& s) {
                       return std::all_of(s.terms.begin(), s.terms.end(),
                                          [](const auto& t) { return is_real(*t.sub); });
                   },
                   [](const auto&) { return true; }},
        sym.v);
}

double sup_abs(const PotentialSymbol& sym) {
    if (is_unbounded(sym)) return inf;
    return std::visit(
        overloaded{[](const symbol::Constant& c) { return std::abs(c.value); },
                   [](const symbol::Decaying& d) { return d.sup_abs; },
                   [](const symbol::TwoSidedLimits& t) {
                       // tanh-type profiles are monotone between the two limits.
                       return std::max(std::abs(t.c_minus), std::abs(t.c_plus));
                   },
                   [](const symbol::ModulatedPower& m) { return m.lambda / std::pow(std::numbers::pi, m.mu); },
                   [](const symbol::AffineRamp&) { return 0.0; },
                   [](const symbol::OscillatoryPhase&) { return 1.0; },
                   [](const symbol::Periodic& p) {
                       double m = 0.0;
                       for (auto v : p.values) m = std::max(m, std::abs(v));
                       return m;
                   },
                   [](const symbol::Separable& s) {
                       double m = 0.0;
                       for (const auto& t : s.terms) m += sup_abs(*t.sub);
                       return m;
                   },
                   [](const auto&) { return inf; }},
        sym.v);
}

double sup_abs_on(const PotentialSymbol& sym, const Window& w) {
    const double ext = window_extent(w);
    return std::visit(
        overloaded{[&](const symbol::Plateau& p) { return std::max(std::sqrt(std::max(ext, 0.0)) + 1.0, p.negative_value); },
                   [&](const symbol::ModulatedPower& m) {
                       return std::pow(ext, m.a) * m.lambda / std::pow(std::numbers::pi, m.mu) + 1.0;
                   },
                   [&](const symbol::AffineRamp& r) { return std::abs(r.slope) * ext; },
                   [&](const symbol::Coercive& c) { return c.radial(ext); },
                   [&](const symbol::Wall&) { return 0.0; },
                   [&](const symbol::Well& wl) {
                       return wl.lambda * std::pow(std::abs(wl.theta) * ext + std::abs(wl.c), wl.mu);
                   },
                   [&](const symbol::Separable& s) {
                       double m = 0.0;
                       for (const auto& t : s.terms) {
                           if (!is_unbounded(*t.sub)) {
                               m += sup_abs(*t.sub);
                               continue;
                           }
                           // |P x|_inf <= (max row l1 norm) * ext
                           double scale = 0.0;
                           for (const auto& row : t.projection) {
                               double l1 = 0.0;
                               for (auto e : row) l1 += std::abs(static_cast<double>(e));
                               scale = std::max(scale, l1);
                           }
                           const auto r = static_cast<std::int64_t>(std::ceil(scale * ext));
                           Point o(t.sub->dim);
                           for (int i = 0; i < o.dim; ++i) o[i] = -r;
                           m += sup_abs_on(*t.sub, Window(o, 2 * r + 1));
                       }
                       return m;
                   },
                   [&](const auto&) { return sup_abs(sym); }},
        sym.v);
}

bool check_modulated_power(const symbol::ModulatedPower& m, double rel_tol) {
    // omega(t) / (lambda |t|^mu) -> 1 as t -> 0.
    for (double t : {1e-3, -1e-3, 1e-4}) {
        const double ratio = m.omega(t) / (m.lambda * std::pow(std::abs(t), m.mu));
        if (std::abs(ratio - 1.0) > rel_tol) return false;
    }
    // Vanishes on integers only, and is 1-periodic.
    for (int k = -3; k <= 3; ++k) {
        if (std::abs(m.omega(static_cast<double>(k))) > 1e-12) return false;
        for (double s : {0.1, 0.25, 0.5, 0.77}) {
            const double t = k + s;
            if (!(m.omega(t) > 0)) return false;
            if (std::abs(m.omega(t) - m.omega(s)) > 1e-9 * (1.0 + m.omega(s))) return false;
        }
    }
    return true;
}

std::string describe(const PotentialSymbol& sym) {
    std::ostringstream os;
    std::visit(overloaded{[&](const symbol::Constant& c) { os << "Constant(" << c.value << ")"; },
                          [&](const symbol::Decaying& d) { os << "Decaying(" << d.name << ")"; },
                          [&](const symbol::TwoSidedLimits& t) { os << "TwoSidedLimits(" << t.name << ")"; },
                          [&](const symbol::Plateau&) { os << "Plateau"; },
                          [&](const symbol::ModulatedPower& m) {
                              os << "ModulatedPower(a=" << m.a << ",theta=" << m.theta << ",lambda=" << m.lambda
                                 << ",mu=" << m.mu << ")";
                          },
                          [&](const symbol::AffineRamp& r) { os << "AffineRamp(" << r.slope << ")"; },
                          [&](const symbol::OscillatoryPhase&) { os << "OscillatoryPhase(exp(i x^2))"; },
                          [&](const symbol::Coercive& c) { os << "Coercive(" << c.name << ")"; },
                          [&](const symbol::Periodic& p) { os << "Periodic(p=" << p.values.size() << ")"; },
                          [&](const symbol::Wall&) { os << "Wall(x<0)"; },
                          [&](const symbol::Well& w) {
                              os << "Well(" << w.lambda << "*|" << w.theta << "q+" << w.c << "|^" << w.mu << ")";
                          },
                          [&](const symbol::Separable& s) {
                              os << "Separable[";
                              for (std::size_t i = 0; i < s.terms.size(); ++i) {
                                  if (i) os << " + ";
                                  os << describe(*s.terms[i].sub) << "@P";
                                  for (const auto& row : s.terms[i].projection) {
                                      os << "(";
                                      for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
                                      os << ")";
                                  }
                              }
                              os << "]";
                          }},
               sym.v);
    return os.str();
}

SymbolClass classify(const PotentialSymbol& sym) {
    const auto s = simplify(sym);
    if (s.is<symbol::Constant>()) return SymbolClass::constant;
    if (s.is<symbol::Periodic>()) return SymbolClass::periodic;
    return SymbolClass::other;
}

unsigned dependence_mask(const PotentialSymbol& sym) {
    const unsigned all = (1u << sym.dim) - 1u;
    if (sym.is<symbol::Constant>()) return 0u;
    if (const auto* s = sym.as<symbol::Separable>()) {
        unsigned mask = 0u;
        for (const auto& t : s->terms) {
            if (dependence_mask(*t.sub) == 0u) continue;
            for (const auto& row : t.projection)
                for (std::size_t j = 0; j < row.size(); ++j)
                    if (row[j] != 0) mask |= 1u << j;
        }
        return mask;
    }
    return all;
}

PotentialSymbol simplify(const PotentialSymbol& sym) {
    const auto* s = sym.as<symbol::Separable>();
    if (!s) return sym;
    std::vector<symbol::SeparableTerm> kept;
    cplx constant{};
    for (const auto& t : s->terms) {
        auto sub = simplify(*t.sub);
        if (const auto* c = sub.as<symbol::Constant>()) {
            constant += c->value;
            continue;
        }
        kept.push_back({t.projection, std::make_shared<const PotentialSymbol>(std::move(sub))});
    }
    if (kept.empty()) return constant_potential(constant, sym.dim);
    if (constant != cplx{}) {
        std::vector<std::int64_t> row(static_cast<std::size_t>(sym.dim), 0);
        kept.push_back({{row}, std::make_shared<const PotentialSymbol>(constant_potential(constant, 1))});
    }
    return {symbol::Separable{std::move(kept)}, sym.dim};
}

}  // namespace limspec
