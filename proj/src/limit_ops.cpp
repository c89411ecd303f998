#include "limspec/limit_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "limspec/linalg.hpp"

namespace limspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string default_label(const DirectionSequence::Variant& v) {
    return std::visit(overloaded{[](const seq::Explicit& e) { return "explicit(" + std::to_string(e.points.size()) + ")"; },
                                 [](const seq::Ray& r) {
                                     std::ostringstream os;
                                     os << "ray(";
                                     for (std::size_t i = 0; i < r.alpha.size(); ++i) os << (i ? "," : "") << r.alpha[i];
                                     os << ")";
                                     return os.str();
                                 },
                                 [](const seq::PlateauCenters& p) {
                                     return std::string(p.midpoints ? "plateau-midpoints" : "plateau-centers");
                                 },
                                 [](const seq::FractionalTarget& f) {
                                     std::ostringstream os;
                                     os << "fractional(c=" << f.c << ")";
                                     return os.str();
                                 }},
                      v);
}

std::vector<double> unit(const std::vector<double>& alpha) {
    double n = 0.0;
    for (double a : alpha) n += a * a;
    n = std::sqrt(n);
    if (!(n > 0.0)) throw PreconditionError("ray direction must be nonzero");
    std::vector<double> u(alpha);
    for (double& a : u) a /= n;
    return u;
}

std::vector<Point> fractional_points(const seq::FractionalTarget& f, const symbol::ModulatedPower& m) {
    const double excess = m.a - m.mu * (1.0 - m.theta);
    const double inv_theta = 1.0 / m.theta;
    std::vector<Point> out;
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    for (std::size_t k = 0; k < f.count; ++k) {
        auto mk = static_cast<std::int64_t>(std::llround(f.m_start * std::pow(f.growth, static_cast<double>(k))));
        std::optional<std::int64_t> x;
        for (std::int64_t step = 0; step < 100000 && !x; ++step, ++mk) {
            const auto xi = static_cast<double>(std::pow(static_cast<long double>(mk), static_cast<long double>(inv_theta)));
            if (std::abs(excess) <= 1e-12) {
                const double target = xi + f.c * inv_theta;
                if (std::abs(target - std::round(target)) <= 0.05) x = std::llround(target);
            } else if (excess < 0.0) {
                if (f.c <= 0.0) {
                    x = std::llround(xi);
                    continue;
                }
                const auto half = static_cast<double>(
                    std::pow(static_cast<long double>(mk) + 0.5L, static_cast<long double>(inv_theta)));
                if (evaluate_real(m, half) < f.c) continue;
                double lo = xi, hi = half;
                for (int it = 0; it < 200 && hi - lo > 0.25; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (evaluate_real(m, mid) < f.c ? lo : hi) = mid;
                }
                x = std::llround(0.5 * (lo + hi));
            } else {
                x = std::llround(xi);
            }
        }
        if (!x) throw PreconditionError("fractional target: no admissible lattice point found near m = " + std::to_string(mk));
        if (*x > last) {
            out.push_back(Point{*x});
            last = *x;
        }
    }
    return out;
}

/// Lower bound of the real part of a real potential; nullopt if unbounded below or complex.
std::optional<double> potential_lower_bound(const PotentialSymbol& v) {
    if (!is_real(v)) return std::nullopt;
    return std::visit(
        overloaded{[](const symbol::Constant& c) -> std::optional<double> { return c.value.real(); },
                   [](const symbol::Decaying& d) -> std::optional<double> { return -d.sup_abs; },
                   [](const symbol::TwoSidedLimits& t) -> std::optional<double> { return std::min(t.c_minus, t.c_plus); },
                   [](const symbol::Plateau&) -> std::optional<double> { return 0.0; },
                   [](const symbol::ModulatedPower&) -> std::optional<double> { return 0.0; },
                   [](const symbol::AffineRamp& r) -> std::optional<double> {
                       if (r.slope == 0.0) return 0.0;
                       return std::nullopt;
                   },
                   [](const symbol::OscillatoryPhase&) -> std::optional<double> { return std::nullopt; },
                   [](const symbol::Coercive& c) -> std::optional<double> { return c.radial(0.0); },
                   [](const symbol::Periodic& p) -> std::optional<double> {
                       double m = std::numeric_limits<double>::infinity();
                       for (auto x : p.values) m = std::min(m, x.real());
                       return m;
                   },
                   [](const symbol::Wall&) -> std::optional<double> { return 0.0; },
                   [](const symbol::Well&) -> std::optional<double> { return 0.0; },
                   [](const symbol::Separable& s) -> std::optional<double> {
                       double sum = 0.0;
                       for (const auto& t : s.terms) {
                           auto b = potential_lower_bound(*t.sub);
                           if (!b) return std::nullopt;
                           sum += *b;
                       }
                       return sum;
                   }},
        v.v);
}

bool cauchy_ok(const std::vector<double>& gaps, double tol, std::size_t min_dec) {
    if (gaps.size() < min_dec || gaps.back() >= tol) return false;
    const std::size_t start = gaps.size() - min_dec;
    bool numerically_zero = true;
    bool decreasing = true;
    for (std::size_t i = start; i < gaps.size(); ++i) {
        numerically_zero = numerically_zero && gaps[i] < tol * 1e-3;
        if (i > start) decreasing = decreasing && gaps[i] <= gaps[i - 1];
    }
    return decreasing || numerically_zero;
}

bool no_decay(const std::vector<double>& gaps, double tol, std::size_t min_div) {
    if (gaps.size() < min_div) return false;
    const std::size_t start = gaps.size() - min_div;
    double tail_max = 0.0;
    for (std::size_t i = start; i < gaps.size(); ++i) {
        if (gaps[i] < tol) return false;
        tail_max = std::max(tail_max, gaps[i]);
    }
    // The envelope of the gaps does not shrink.
    const std::size_t head = std::max<std::size_t>(1, gaps.size() / 2);
    const double head_max = *std::max_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(head));
    return tail_max >= 0.5 * head_max;
}

Matrix weighted(Matrix m, const LocalProbe& probe) {
    for (std::size_t j = 0; j < probe.window.size(); ++j)
        m.col(static_cast<Eigen::Index>(j)) *= probe.weight(probe.window.point_at(j));
    return m;
}

std::string join_provenance(const std::string& a, const std::string& b) { return a.empty() ? b : a + " | " + b; }

}  // namespace

std::string to_string(LimitKind k) {
    switch (k) {
        case LimitKind::finite: return "finite";
        case LimitKind::infinity: return "infinity";
        case LimitKind::no_limit: return "no_limit";
    }
    return "?";
}

std::string to_string(LimitMode m) {
    switch (m) {
        case LimitMode::symbolic: return "symbolic";
        case LimitMode::operator_norm: return "operator";
        case LimitMode::resolvent: return "resolvent";
    }
    return "?";
}

DirectionSequence explicit_sequence(std::vector<Point> pts, std::string label) {
    if (pts.empty()) throw PreconditionError("explicit sequence is empty");
    const int d = pts.front().dim;
    DirectionSequence s{seq::Explicit{std::move(pts)}, d, std::move(label)};
    if (s.label.empty()) s.label = default_label(s.v);
    return s;
}

DirectionSequence ray_sequence(std::vector<double> alpha, std::vector<double> radii, std::string label) {
    const int d = static_cast<int>(alpha.size());
    if (d < 1 || d > max_dim) throw PreconditionError("ray direction dimension must be in [1, 3]");
    DirectionSequence s{seq::Ray{std::move(alpha), std::move(radii)}, d, std::move(label)};
    if (s.label.empty()) s.label = default_label(s.v);
    return s;
}

DirectionSequence plateau_centers(std::vector<std::int64_t> n, bool midpoints, std::string label) {
    DirectionSequence s{seq::PlateauCenters{std::move(n), midpoints}, 1, std::move(label)};
    if (s.label.empty()) s.label = default_label(s.v);
    return s;
}

DirectionSequence fractional_target(double c, std::size_t count, double m_start, double growth, std::string label) {
    DirectionSequence s{seq::FractionalTarget{c, count, m_start, growth}, 1, std::move(label)};
    if (s.label.empty()) s.label = default_label(s.v);
    return s;
}

std::vector<Point> realize(const DirectionSequence& s, const PotentialSymbol* v) {
    std::vector<Point> pts = std::visit(
        overloaded{[](const seq::Explicit& e) { return e.points; },
                   [](const seq::Ray& r) {
                       const auto u = unit(r.alpha);
                       std::vector<Point> out;
                       std::int64_t last = -1;
                       for (double rad : r.radii) {
                           Point p(static_cast<int>(u.size()));
                           for (std::size_t i = 0; i < u.size(); ++i)
                               p[static_cast<int>(i)] = std::llround(rad * u[i]);
                           // Roundings can repeat a norm; keep strictly increasing ones.
                           if (norm_inf(p) > last) {
                               out.push_back(p);
                               last = norm_inf(p);
                           }
                       }
                       return out;
                   },
                   [](const seq::PlateauCenters& p) {
                       std::vector<Point> out;
                       for (auto n : p.n) out.push_back(Point{n * n + (p.midpoints ? n / 2 : 0)});
                       return out;
                   },
                   [&](const seq::FractionalTarget& f) {
                       const auto* m = v ? v->as<symbol::ModulatedPower>() : nullptr;
                       if (!m) throw PreconditionError("fractional target sequences need a ModulatedPower symbol");
                       return fractional_points(f, *m);
                   }},
        s.v);
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (norm_inf(pts[i]) <= norm_inf(pts[i - 1]))
            throw PreconditionError("sequence " + s.label + ": norms must increase strictly");
    return pts;
}

int sequence_end(const DirectionSequence& s, const PotentialSymbol* v) {
    if (s.dim != 1) return 0;
    if (const auto* r = std::get_if<seq::Ray>(&s.v)) return r->alpha[0] > 0 ? 1 : (r->alpha[0] < 0 ? -1 : 0);
    if (std::holds_alternative<seq::PlateauCenters>(s.v) || std::holds_alternative<seq::FractionalTarget>(s.v)) return 1;
    const auto pts = realize(s, v);
    const std::size_t k = std::min<std::size_t>(3, pts.size());
    int sign = 0;
    for (std::size_t i = pts.size() - k; i < pts.size(); ++i) {
        const int si = pts[i][0] > 0 ? 1 : (pts[i][0] < 0 ? -1 : 0);
        if (sign == 0) sign = si;
        if (si != sign || si == 0) return 0;
    }
    return sign;
}

SymbolicLimit symbolic_limit(const PotentialSymbol& v, const DirectionSequence& s) {
    using K = LimitKind;
    auto finite = [](PotentialSymbol p) { return SymbolicLimit{K::finite, std::move(p), {}}; };
    auto none = [](std::string why) { return SymbolicLimit{K::no_limit, std::nullopt, std::move(why)}; };
    auto infinite = [](std::string why) { return SymbolicLimit{K::infinity, std::nullopt, std::move(why)}; };
    if (s.dim != v.dim) return none("sequence dimension differs from the symbol dimension");

    return std::visit(
        overloaded{
            [&](const symbol::Constant&) { return finite(v); },
            [&](const symbol::Decaying&) { return finite(constant_potential(0.0, v.dim)); },
            [&](const symbol::TwoSidedLimits& t) {
                const int end = sequence_end(s, &v);
                if (end > 0) return finite(constant_potential(t.c_plus));
                if (end < 0) return finite(constant_potential(t.c_minus));
                return none("sequence does not tend to a single end of Z");
            },
            [&](const symbol::Plateau& p) {
                if (const auto* pc = std::get_if<seq::PlateauCenters>(&s.v))
                    return pc->midpoints ? finite(constant_potential(0.0)) : finite(wall());
                if (sequence_end(s, &v) < 0) return finite(constant_potential(p.negative_value));
                return none("plateau localizations are defined along plateau centres or midpoints");
            },
            [&](const symbol::ModulatedPower& m) {
                const double excess = m.a - m.mu * (1.0 - m.theta);
                if (excess > 1e-12) return infinite("a > mu (1 - theta): the potential tends to infinity on windows");
                const auto* ft = std::get_if<seq::FractionalTarget>(&s.v);
                if (!ft) return none("modulated power limits need a fractional target sequence");
                if (excess < -1e-12) return finite(constant_potential(ft->c));
                return finite(well(m.lambda, m.theta, ft->c, m.mu));
            },
            [&](const symbol::AffineRamp& r) {
                if (r.slope == 0.0) return finite(constant_potential(0.0));
                return infinite("|v| grows linearly along every sequence");
            },
            [&](const symbol::OscillatoryPhase&) {
                return none("the phase x^2 has no limit modulo 2 pi along translates");
            },
            [&](const symbol::Coercive&) { return infinite("coercive potential"); },
            [&](const symbol::Periodic& p) {
                const auto pts = realize(s, &v);
                const auto n = static_cast<std::int64_t>(p.values.size());
                std::optional<std::int64_t> k;
                for (const auto& x : pts) {
                    const std::int64_t r = ((x[0] % n) + n) % n;
                    if (k && *k != r) return none("residues modulo the period do not stabilize");
                    k = r;
                }
                std::vector<cplx> rot(p.values.size());
                for (std::int64_t j = 0; j < n; ++j) rot[static_cast<std::size_t>(j)] = p.values[static_cast<std::size_t>((j + *k) % n)];
                return finite(periodic(std::move(rot)));
            },
            [&](const symbol::Wall&) {
                const int end = sequence_end(s, &v);
                if (end > 0) return finite(constant_potential(0.0));
                if (end < 0) return infinite("left of the wall");
                return none("sequence does not tend to a single end of Z");
            },
            [&](const symbol::Well&) { return infinite("well potential grows at infinity"); },
            [&](const symbol::Separable& sep) {
                const auto* ray = std::get_if<seq::Ray>(&s.v);
                if (!ray) return none("separable symbols are localized along rays");
                const auto u = unit(ray->alpha);
                std::vector<symbol::SeparableTerm> terms;
                bool infinite_term = false;
                for (const auto& t : sep.terms) {
                    std::vector<double> beta(t.projection.size(), 0.0);
                    double bn = 0.0;
                    for (std::size_t i = 0; i < t.projection.size(); ++i) {
                        for (std::size_t j = 0; j < u.size(); ++j)
                            beta[i] += static_cast<double>(t.projection[i][j]) * u[j];
                        bn = std::max(bn, std::abs(beta[i]));
                    }
                    // Directions built from cos/sin carry ~1e-16 residue on the axes.
                    if (bn < 1e-9) {
                        terms.push_back(t);
                        continue;
                    }
                    const auto sub = symbolic_limit(*t.sub, ray_sequence(beta, ray->radii));
                    if (sub.kind == K::no_limit) return none("term along projected direction: " + sub.reason);
                    if (sub.kind == K::infinity) {
                        infinite_term = true;
                        continue;
                    }
                    terms.push_back(separable_term(t.projection, *sub.symbol));
                }
                if (infinite_term) return infinite("a separable term tends to infinity");
                return finite(simplify(separable(v.dim, std::move(terms))));
            }},
        v.v);
}

LatticeKernel limit_kernel(const HopMap& hop, const PotentialSymbol& limit, bool selfadjoint) {
    BuildOptions opts{.selfadjoint = selfadjoint, .clamp_window = std::nullopt};
    if (!limit.is<symbol::Wall>() && is_unbounded(limit))
        opts.clamp_window = Window::centered(zero_point(limit.dim), 1025);
    return build_schrodinger(hop, limit, opts);
}

cplx resolvent_point(const LatticeKernel& a, const NumericLimitOptions& opts) {
    if (opts.z0) return *opts.z0;
    const auto& tag = a.tag();
    if (!tag || !tag->selfadjoint) return {0.0, 1.0};
    const auto vb = potential_lower_bound(tag->potential);
    if (!vb) return {0.0, 1.0};
    // Gershgorin lower bound of the hopping part.
    double hb = hop_value(tag->hop, zero_point(a.dim())).real();
    for (const auto& [m, h] : tag->hop)
        if (!(m == zero_point(a.dim()))) hb -= std::abs(h);
    return {std::min(-1.0, hb + *vb - 1.0), 0.0};
}

LimitOperator numeric_limit(const LatticeKernel& a, const DirectionSequence& s, const LocalProbe& probe,
                            const NumericLimitOptions& opts) {
    const auto& tag = a.tag();
    const PotentialSymbol* sym = tag ? &tag->potential : nullptr;
    const auto pts = realize(s, sym);
    if (pts.size() < 3) throw PreconditionError("numeric_limit: need at least 3 sequence points");

    LimitOperator out;
    out.provenance = s.label;
    if (tag) out.hop = tag->hop;
    std::optional<SymbolicLimit> symb;
    if (sym) symb = symbolic_limit(*sym, s);

    const bool resolvent_mode = a.carrier() || (sym && is_unbounded(*sym));
    const std::size_t n = pts.size();
    std::vector<double> gaps(n - 1, 0.0);

    if (!resolvent_mode) {
        out.mode = LimitMode::operator_norm;
        std::vector<Matrix> comp(n);
        parallel_for(n, [&](std::size_t k) { comp[k] = compress(translate(a, pts[k]), probe.window); });
        for (std::size_t k = 0; k + 1 < n; ++k)
            gaps[k] = linalg::largest_singular_value(weighted(comp[k] - comp[k + 1], probe));
        for (std::size_t k = 0; k + 1 < n; ++k) out.certificate.push_back({k, pts[k], gaps[k]});

        const LatticeKernel last = translate(a, pts.back());
        if (cauchy_ok(gaps, opts.tol, opts.min_decreasing)) {
            out.kind = LimitKind::finite;
            out.op = last;
            if (symb && symb->kind == LimitKind::finite) {
                const auto lk = limit_kernel(tag->hop, *symb->symbol, tag->selfadjoint);
                out.symbolic_distance = local_distance(last, lk, probe);
                out.agrees_with_symbolic = *out.symbolic_distance < opts.agreement_tol;
                if (out.agrees_with_symbolic) {
                    out.op = lk;
                    out.symbol = symb->symbol;
                }
            } else if (symb) {
                out.agrees_with_symbolic = false;
                out.reason = "numeric limit exists but the symbolic verdict is " + to_string(symb->kind);
            }
            return out;
        }
        out.kind = LimitKind::no_limit;
        // Weak-limit-zero alternative: the central column keeps its size while
        // it keeps moving.
        const auto centre = static_cast<Eigen::Index>(probe.window.index_of(zero_point(a.dim())));
        double col_min = std::numeric_limits<double>::infinity(), col_max = 0.0, osc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double c = comp[k].col(centre).norm();
            col_min = std::min(col_min, c);
            col_max = std::max(col_max, c);
            for (std::size_t j = 0; j < k; ++j) osc = std::max(osc, (comp[k].col(centre) - comp[j].col(centre)).norm());
        }
        const bool weak_excluded = col_min > opts.tol && col_min >= 0.5 * col_max && osc >= opts.tol;
        out.divergence_certified = no_decay(gaps, opts.tol, opts.min_divergent) && weak_excluded;
        out.reason = out.divergence_certified ? "translates keep a non-decaying distance; weak limit 0 excluded"
                                              : "Cauchy test inconclusive";
        if (symb && symb->kind != LimitKind::no_limit) out.agrees_with_symbolic = false;
        return out;
    }

    out.mode = LimitMode::resolvent;
    const cplx z0 = resolvent_point(a, opts);
    const std::int64_t margin = opts.resolvent_margin;
    Point eo = probe.window.offset;
    for (int i = 0; i < eo.dim; ++i) eo[i] -= margin;
    const Window ext(eo, probe.window.side + 2 * margin);
    std::vector<Matrix> res(n);
    std::vector<double> norms(n);
    parallel_for(n, [&](std::size_t k) {
        res[k] = window_resolvent(translate_clamped(a, pts[k], ext), probe.window, z0, margin);
        norms[k] = linalg::largest_singular_value(res[k]);
    });
    for (std::size_t k = 0; k + 1 < n; ++k) {
        gaps[k] = linalg::largest_singular_value(weighted(res[k] - res[k + 1], probe));
        out.certificate.push_back({k, pts[k], gaps[k]});
    }
    out.resolvent_norms = norms;
    const auto det = detect_infinity(norms, opts.infinity_tol);
    if (det.fired) {
        out.kind = LimitKind::infinity;
        out.infinity_from = det.from_index;
        out.reason = "windowed resolvent norms fall below " + std::to_string(opts.infinity_tol);
        out.agrees_with_symbolic = !symb || symb->kind == LimitKind::infinity;
        return out;
    }
    if (cauchy_ok(gaps, opts.tol, opts.min_decreasing)) {
        out.kind = LimitKind::finite;
        out.op = translate_clamped(a, pts.back(), ext);
        if (symb && symb->kind == LimitKind::finite) {
            const auto lk = limit_kernel(tag->hop, *symb->symbol, tag->selfadjoint);
            const Matrix rl = window_resolvent(lk, probe.window, z0, margin);
            out.symbolic_distance = linalg::largest_singular_value(weighted(res.back() - rl, probe));
            out.agrees_with_symbolic = *out.symbolic_distance < opts.agreement_tol;
            if (out.agrees_with_symbolic) {
                out.op = lk;
                out.symbol = symb->symbol;
            }
        } else if (symb) {
            out.agrees_with_symbolic = false;
            out.reason = "numeric limit exists but the symbolic verdict is " + to_string(symb->kind);
        }
        return out;
    }
    out.kind = LimitKind::no_limit;
    out.divergence_certified = no_decay(gaps, opts.tol, opts.min_divergent);
    out.reason = out.divergence_certified ? "windowed resolvents keep a non-decaying distance"
                                          : "Cauchy test inconclusive";
    if (symb && symb->kind != LimitKind::no_limit) out.agrees_with_symbolic = false;
    return out;
}

DirectionalLimit directional_limit(const LatticeKernel& a, const std::vector<double>& alpha,
                                   const std::vector<double>& radii, const LocalProbe& probe,
                                   const NumericLimitOptions& opts) {
    if (!a.tag()) throw PreconditionError("directional_limit needs a kernel built from a symbol");
    if (static_cast<int>(alpha.size()) != a.dim()) throw PreconditionError("direction has the wrong dimension");
    std::vector<double> doubled(radii);
    for (double& r : doubled) r *= 2.0;
    DirectionalLimit d;
    d.limit = numeric_limit(a, ray_sequence(alpha, radii), probe, opts);
    d.doubled = numeric_limit(a, ray_sequence(alpha, doubled), probe, opts);
    // Compare the last translates themselves, not the symbolic replacements.
    const auto p1 = realize(ray_sequence(alpha, radii));
    const auto p2 = realize(ray_sequence(alpha, doubled));
    d.representative_gap = local_distance(translate(a, p1.back()), translate(a, p2.back()), probe);
    d.independent = d.limit.kind == d.doubled.kind && d.representative_gap < opts.agreement_tol;
    if (d.independent && d.limit.op && d.doubled.op)
        d.independent = local_distance(*d.limit.op, *d.doubled.op, probe) < opts.agreement_tol;
    return d;
}

std::vector<LimitOperator> dedupe_limits(const std::vector<LimitOperator>& limits, const LocalProbe& probe, double tol) {
    std::vector<LimitOperator> out;
    for (const auto& l : limits) {
        bool merged = false;
        for (auto& k : out) {
            if (k.kind != l.kind || l.kind == LimitKind::no_limit) continue;
            if (l.kind == LimitKind::infinity || local_distance(*k.op, *l.op, probe) < tol) {
                if (k.provenance.find(l.provenance) == std::string::npos)
                    k.provenance = join_provenance(k.provenance, l.provenance);
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(l);
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].id.empty()) out[i].id = "L" + std::to_string(i);
    return out;
}

std::vector<LimitOperator> operator_spectrum_sample(const LatticeKernel& a, const std::vector<DirectionSequence>& seqs,
                                                    const LocalProbe& probe, const NumericLimitOptions& opts,
                                                    Exec exec) {
    if (seqs.empty()) throw PreconditionError("operator_spectrum_sample: no sequences");
    std::vector<LimitOperator> all(seqs.size());
    parallel_for(seqs.size(), [&](std::size_t k) { all[k] = numeric_limit(a, seqs[k], probe, opts); }, exec);
    return dedupe_limits(all, probe, opts.agreement_tol);
}

}  // namespace limspec
