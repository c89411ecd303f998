#include "limspec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "limspec/resolvent.hpp"

namespace limspec {

namespace fs = std::filesystem;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

cplx complex_of(const json& j) {
    return j.is_number() ? cplx{j.get<double>(), 0.0} : cplx{j[0].get<double>(), j[1].get<double>()};
}

/// Sorted real eigenvalues of a Hermitian window matrix.
std::vector<double> hermitian_eigenvalues(const Matrix& m) {
    Eigen::VectorXd ev;
    if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), Eigen::EigenvaluesOnly);
        ev = es.eigenvalues();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        ev = es.eigenvalues();
    }
    return {ev.data(), ev.data() + ev.size()};
}

struct Context {
    const Scenario& s;
    const LatticeKernel& a;
    const std::vector<DirectionSequence>& seqs;
    const LocalProbe& probe;
    const std::vector<LimitOperator>& limits;
    const std::optional<EssentialSpectrum>& ess;
    const std::optional<SpectrumEstimate>& direct;
    std::size_t& evaluations;
};

AssertionOutcome outcome(const json& spec, bool passed, double value, double tol, std::string detail) {
    return {spec.at("name").get<std::string>(), spec.at("type").get<std::string>(), passed, value, tol,
            std::move(detail)};
}

AssertionOutcome unavailable(const json& spec, const std::string& why) { return outcome(spec, false, inf, 0.0, why); }

AssertionOutcome check_plateau_resolvent(const Context& c, const json& spec) {
    if (c.s.op.dim != 1) return unavailable(spec, "requires a one-dimensional operator");
    const auto ns = spec.at("n").get<std::vector<std::int64_t>>();
    const auto side = spec.at("side").get<std::int64_t>();
    const auto margin = spec.at("margin").get<std::int64_t>();
    const cplx z = complex_of(spec.at("z"));
    const double tol = spec.at("max").get<double>();
    const Window w = Window::centered(Point{0}, side);
    const Window ext(w.offset - Point{margin}, side + 2 * margin);

    // Dirichlet half-line resolvent of the hop part on {x >= 0}, direct sum 0 on {x < 0}.
    const auto hop = make_hop(c.s.op.hop, 1);
    const std::int64_t depth = w.offset[0] + side + 400;
    const auto free = build_schrodinger(hop, constant_potential(0.0, 1));
    Matrix half = compress(free, Window(Point{0}, depth), static_cast<std::size_t>(depth));
    half -= z * Matrix::Identity(depth, depth);
    const Matrix g = half.inverse();
    Matrix oracle = Matrix::Zero(side, side);
    for (std::int64_t i = 0; i < side; ++i)
        for (std::int64_t j = 0; j < side; ++j) {
            const auto x = w.offset[0] + i, y = w.offset[0] + j;
            if (x >= 0 && y >= 0) oracle(i, j) = g(x, y);
        }

    std::vector<double> diffs;
    for (auto n : ns) {
        const auto tau = translate_clamped(c.a, Point{n * n}, ext);
        const Matrix r = window_resolvent(tau, w, z, margin, c.s.dense_cap);
        diffs.push_back((r - oracle).cwiseAbs().maxCoeff());
        ++c.evaluations;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < diffs.size(); ++i) decreasing = decreasing && diffs[i] < diffs[i - 1];
    std::string detail = "max entrywise difference per n:";
    for (std::size_t i = 0; i < ns.size(); ++i) detail += " n=" + std::to_string(ns[i]) + ":" + fmt(diffs[i]);
    detail += decreasing ? "; decreasing" : "; not decreasing";
    const double last = diffs.empty() ? inf : diffs.back();
    return outcome(spec, decreasing && last <= tol, last, tol, detail);
}

AssertionOutcome check_well_eigenvalues(const Context& c, const json& spec) {
    const auto v = make_potential(c.s.op.potential, c.s.op.dim);
    if (!v.is<symbol::ModulatedPower>()) return unavailable(spec, "requires a modulated_power potential");
    const auto hop = make_hop(c.s.op.hop, 1);
    const double m = spec.at("m").get<double>();
    const auto side = spec.at("side").get<std::int64_t>();
    const auto ref_side = spec.at("reference_side").get<std::int64_t>();
    const auto count = static_cast<std::size_t>(spec.at("count").get<std::int64_t>());
    const double tol = spec.at("max").get<double>();
    const Window w = Window::centered(Point{0}, side);
    double worst = 0.0;
    std::string detail;
    for (const auto& cj : spec.at("c")) {
        const double cv = cj.get<double>();
        const auto seq = fractional_target(cv, 1, m, 2.0);
        const auto sym = symbolic_limit(v, seq);
        if (sym.kind != LimitKind::finite || !sym.symbol)
            return unavailable(spec, "c=" + fmt(cv) + " has no finite well limit: " + sym.reason);
        const Point x = realize(seq, &v).front();
        const auto far = hermitian_eigenvalues(compress(translate_clamped(c.a, x, w), w, c.s.dense_cap));
        const auto well_op = limit_kernel(hop, *sym.symbol, true);
        const auto ref =
            hermitian_eigenvalues(compress(well_op, Window::centered(Point{0}, ref_side), c.s.dense_cap));
        c.evaluations += 2;
        if (far.size() < count || ref.size() < count) return unavailable(spec, "window smaller than the eigenvalue count");
        double d = 0.0;
        for (std::size_t k = 0; k < count; ++k) d = std::max(d, std::abs(far[k] - ref[k]));
        worst = std::max(worst, d);
        detail += (detail.empty() ? "" : "; ") + std::string("c=") + fmt(cv) + " at x=" + x.str() + ": " + fmt(d);
    }
    return outcome(spec, worst <= tol, worst, tol, detail);
}

AssertionOutcome check_eigenvalue_counts(const Context& c, const json& spec) {
    const auto sides = spec.at("sides").get<std::vector<std::int64_t>>();
    const auto levels = spec.at("max_level").get<std::int64_t>();
    if (!c.s.op.selfadjoint) return unavailable(spec, "requires a self-adjoint operator");
    std::vector<std::vector<std::size_t>> counts;
    for (auto side : sides) {
        const Window w = Window::centered(zero_point(c.s.op.dim), side);
        const auto ev = hermitian_eigenvalues(compress(translate_clamped(c.a, zero_point(c.s.op.dim), w), w, c.s.dense_cap));
        ++c.evaluations;
        std::vector<std::size_t> per(static_cast<std::size_t>(levels), 0);
        for (double e : ev) {
            const double f = std::floor(e);
            if (f >= 0 && f < static_cast<double>(levels)) ++per[static_cast<std::size_t>(f)];
        }
        counts.push_back(per);
    }
    double worst = 0.0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        for (std::size_t k = 0; k < counts[i].size(); ++k)
            worst = std::max(worst, std::abs(static_cast<double>(counts[i][k]) - static_cast<double>(counts[i - 1][k])));
    std::string detail = "eigenvalues per unit interval [k, k+1):";
    for (std::size_t i = 0; i < sides.size(); ++i) {
        detail += " side " + std::to_string(sides[i]) + " {";
        for (std::size_t k = 0; k < counts[i].size(); ++k) detail += (k ? "," : "") + std::to_string(counts[i][k]);
        detail += "}";
    }
    return outcome(spec, worst == 0.0, worst, 0.0, detail);
}

AssertionOutcome check_window_pollution(const Context& c, const json& spec) {
    const auto center = Point::from_vector(spec.at("center").get<std::vector<std::int64_t>>());
    const auto side = spec.at("side").get<std::int64_t>();
    const double min_distance = spec.at("min_distance").get<double>();
    if (!c.ess) return unavailable(spec, "requires a lambda grid");
    const Window w = Window::centered(center, side);
    Eigen::ComplexEigenSolver<Matrix> es(compress(c.a, w, c.s.dense_cap), false);
    ++c.evaluations;
    std::vector<cplx> members;
    for (const auto& smp : c.ess->samples)
        if (smp.member) members.push_back(smp.lambda);
    if (members.empty()) return unavailable(spec, "the essential spectrum estimate is empty");
    // Every window eigenvalue is at least min_distance away from the estimate.
    double nearest = inf, max_abs = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx e = es.eigenvalues()(i);
        max_abs = std::max(max_abs, std::abs(e));
        for (cplx m : members) nearest = std::min(nearest, std::abs(e - m));
    }
    return outcome(spec, nearest >= min_distance, nearest, min_distance,
                   std::to_string(es.eigenvalues().size()) + " window eigenvalues, max modulus " + fmt(max_abs) +
                       ", distance to the estimate " + fmt(nearest));
}

AssertionOutcome check_directional(const Context& c, const json& spec) {
    double worst = 0.0;
    std::size_t rays = 0, failures = 0;
    std::string detail;
    for (const auto& q : c.seqs) {
        const auto* ray = std::get_if<seq::Ray>(&q.v);
        if (!ray) continue;
        ++rays;
        const auto d = directional_limit(c.a, ray->alpha, ray->radii, c.probe, c.s.limits);
        worst = std::max(worst, d.representative_gap);
        if (!d.independent) {
            ++failures;
            detail += (detail.empty() ? "dependent: " : ", ") + q.label;
        }
    }
    if (rays == 0) return unavailable(spec, "no ray sequences");
    if (detail.empty()) detail = std::to_string(rays) + " rays independent of the representative";
    return outcome(spec, failures == 0, worst, c.s.limits.agreement_tol, detail);
}

AssertionOutcome check_circle(const Context& c, const json& spec) {
    if (!c.ess) return unavailable(spec, "requires a lambda grid");
    const double radius = spec.at("radius").get<double>();
    const double within = spec.at("within").get<double>();
    const double exclude = spec.at("exclude").get<double>();
    std::vector<cplx> members;
    for (const auto& smp : c.ess->samples)
        if (smp.member) members.push_back(smp.lambda);
    double cover = inf;
    if (!members.empty()) {
        cover = 0.0;
        for (int k = 0; k < 720; ++k) {
            const cplx p = std::polar(radius, 2.0 * std::numbers::pi * k / 720.0);
            double best = inf;
            for (cplx m : members) best = std::min(best, std::abs(p - m));
            cover = std::max(cover, best);
        }
    }
    std::size_t stray = 0;
    for (cplx m : members)
        if (std::abs(std::abs(m) - radius) >= exclude) ++stray;
    return outcome(spec, cover <= within && stray == 0, cover, within,
                   std::to_string(members.size()) + " member cells; circle covered within " + fmt(cover) + "; " +
                       std::to_string(stray) + " members with ||lambda| - " + fmt(radius) + "| >= " + fmt(exclude));
}

AssertionOutcome evaluate_assertion(const Context& c, const json& spec) {
    const auto type = spec.at("type").get<std::string>();
    const auto& L = c.limits;
    auto count_kind = [&](LimitKind k) {
        return static_cast<std::size_t>(std::count_if(L.begin(), L.end(), [k](const auto& l) { return l.kind == k; }));
    };

    if (type == "limit_count") {
        const auto want = spec.at("equals").get<std::int64_t>();
        return outcome(spec, static_cast<std::int64_t>(L.size()) == want, static_cast<double>(L.size()), 0.0,
                       "expected " + std::to_string(want) + " distinct limits, found " + std::to_string(L.size()));
    }
    if (type == "limits_all") {
        const auto want = spec.at("kind").get<std::string>();
        std::size_t off = 0;
        for (const auto& l : L) off += to_string(l.kind) != want;
        return outcome(spec, !L.empty() && off == 0, static_cast<double>(off), 0.0,
                       std::to_string(off) + " of " + std::to_string(L.size()) + " limits are not " + want);
    }
    if (type == "limits_agree") {
        double worst = 0.0;
        std::size_t off = 0;
        for (const auto& l : L) {
            if (l.kind != LimitKind::finite) continue;
            if (l.symbolic_distance) worst = std::max(worst, *l.symbolic_distance);
            off += !l.agrees_with_symbolic;
        }
        return outcome(spec, off == 0, worst, c.s.limits.agreement_tol,
                       std::to_string(off) + " finite limits disagree with their symbolic limit");
    }
    if (type == "no_limit_certified") {
        std::size_t certified = 0;
        double min_tail = inf;
        for (const auto& l : L) {
            if (l.kind != LimitKind::no_limit) continue;
            certified += l.divergence_certified;
            for (const auto& e : l.certificate) min_tail = std::min(min_tail, e.gap);
        }
        const bool ok = !L.empty() && certified == L.size();
        return outcome(spec, ok, min_tail, c.s.limits.tol,
                       std::to_string(certified) + " of " + std::to_string(L.size()) +
                           " limits certified divergent; smallest Cauchy gap " + fmt(min_tail));
    }
    if (type == "infinity_detected") {
        const double tol = spec.at("max_norm").get<double>();
        double worst = 0.0;
        bool ok = !L.empty();
        std::string detail;
        for (const auto& l : L) {
            if (l.kind != LimitKind::infinity || !l.infinity_from) {
                ok = false;
                detail += (detail.empty() ? "not infinity: " : ", ") + l.provenance;
                continue;
            }
            for (std::size_t i = *l.infinity_from; i < l.resolvent_norms.size(); ++i)
                worst = std::max(worst, l.resolvent_norms[i]);
        }
        if (detail.empty()) detail = "every sampled localization is infinity; largest tail resolvent norm " + fmt(worst);
        return outcome(spec, ok && worst <= tol, worst, tol, detail);
    }
    if (type == "essential_spectrum") {
        if (!c.ess) return unavailable(spec, "requires a lambda grid");
        std::vector<Interval> want;
        for (const auto& iv : spec.at("intervals")) want.push_back({iv[0].get<double>(), iv[1].get<double>(), true, ""});
        const double tol = spec.at("max_hausdorff").get<double>();
        const double h = hausdorff(c.ess->estimate.intervals, want);
        return outcome(spec, h <= tol, h, tol, "Hausdorff distance to the expected union " + fmt(h));
    }
    if (type == "essential_spectrum_empty") {
        if (!c.ess) return unavailable(spec, "requires a lambda grid");
        const auto members = std::count_if(c.ess->samples.begin(), c.ess->samples.end(), [](const auto& x) { return x.member; });
        return outcome(spec, c.ess->estimate.empty(), static_cast<double>(members), 0.0,
                       std::to_string(members) + " grid points in the estimate");
    }
    if (type == "no_essential_claim") {
        const bool claimed = c.ess.has_value() || c.direct.has_value();
        return outcome(spec, !claimed, claimed ? 1.0 : 0.0, 0.0,
                       claimed ? "an essential-spectrum estimate was emitted" : "no essential-spectrum estimate emitted");
    }
    if (type == "cross_check") {
        if (!c.ess || !c.direct) return unavailable(spec, "requires a lambda grid and direct windows");
        const double tol = spec.at("max_hausdorff").get<double>();
        const double h = hausdorff(c.ess->estimate.intervals, c.direct->intervals);
        return outcome(spec, h <= tol, h, tol, "Hausdorff distance between the limit union and the direct estimate " + fmt(h));
    }
    if (type == "covers") {
        if (!c.ess) return unavailable(spec, "requires a lambda grid");
        const double lo = spec.at("lo").get<double>(), hi = spec.at("hi").get<double>(), edge = spec.at("edge").get<double>();
        std::size_t checked = 0, missing = 0;
        for (const auto& smp : c.ess->samples) {
            const double x = smp.lambda.real();
            if (smp.lambda.imag() != 0.0 || x < lo + edge || x > hi - edge) continue;
            ++checked;
            missing += !smp.member;
        }
        return outcome(spec, checked > 0 && missing == 0, static_cast<double>(missing), 0.0,
                       std::to_string(missing) + " of " + std::to_string(checked) + " grid points in [" + fmt(lo + edge) +
                           ", " + fmt(hi - edge) + "] outside the estimate");
    }
    if (type == "circle") return check_circle(c, spec);
    if (type == "window_pollution") return check_window_pollution(c, spec);
    if (type == "plateau_resolvent") return check_plateau_resolvent(c, spec);
    if (type == "well_eigenvalues") return check_well_eigenvalues(c, spec);
    if (type == "eigenvalue_counts") return check_eigenvalue_counts(c, spec);
    if (type == "directional_independence") return check_directional(c, spec);
    if (type == "fredholm") {
        const cplx lambda = complex_of(spec.at("lambda"));
        const bool expect = spec.at("expect").get<bool>();
        if (count_kind(LimitKind::no_limit)) return unavailable(spec, "a sequence has no limit");
        const auto v = fredholm_test(L, lambda, c.s.union_opts);
        c.evaluations += 2 * v.per_limit.size();
        return outcome(spec, v.fredholm == expect, v.sup_inverse_norm, c.s.union_opts.tol,
                       std::string("A - lambda is ") + (v.fredholm ? "" : "not ") + "Fredholm");
    }
    return unavailable(spec, "unknown assertion type");
}

}  // namespace

PipelineResult run_pipeline(const Scenario& s, Exec exec) {
    PipelineResult out;
    Report& r = out.report;
    r.scenario = s.name;
    r.hash = scenario_hash(s);
    r.version = library_version();
    r.seed = s.seed;

    auto stage = [&](const char* name, auto&& f) {
        const auto t0 = Clock::now();
        f();
        out.stage_seconds.emplace_back(name, seconds_since(t0));
    };

    std::optional<LatticeKernel> a;
    std::vector<DirectionSequence> seqs;
    std::optional<LocalProbe> probe;
    stage("build", [&] {
        a = make_operator(s);
        seqs = make_sequences(s);
        probe = make_probe(s);
    });

    std::vector<LimitOperator> limits;
    stage("limits", [&] {
        if (!seqs.empty()) limits = operator_spectrum_sample(*a, seqs, *probe, s.limits, exec);
    });
    for (const auto& l : limits) r.limits.push_back(record_of(l));
    const bool has_no_limit =
        std::any_of(limits.begin(), limits.end(), [](const auto& l) { return l.kind == LimitKind::no_limit; });

    std::optional<EssentialSpectrum> ess;
    stage("spectra", [&] {
        if (!s.grid) return;
        if (has_no_limit) {
            r.warnings.push_back("essential spectrum not computed: a sampled sequence has no limit operator");
            return;
        }
        ess = essential_spectrum_union(limits, *s.grid, s.union_opts, exec);
        out.spectral_evaluations += ess->evaluations;
        UnionRecord u{ess->samples, ess->estimate, ess->routes, ess->window_side, ess->stabilized, ess->agreement_history};
        r.union_estimate = std::move(u);
        for (const auto& w : ess->warnings) r.warnings.push_back(w);
    });

    std::optional<SpectrumEstimate> direct;
    stage("cross_check", [&] {
        if (!s.direct) return;
        std::vector<Window> windows;
        for (const auto& [c, side] : s.direct->windows) windows.push_back(Window::centered(Point::from_vector(c), side));
        try {
            direct = direct_essential_estimate(*a, windows, s.direct->boundary_mass, s.direct->margin, s.direct->merge_tol,
                                               exec);
            out.spectral_evaluations += windows.size();
            r.cross_check = direct;
        } catch (const PreconditionError& e) {
            r.warnings.push_back(std::string("cross-check skipped: ") + e.what());
        }
    });

    stage("verdicts", [&] {
        if (s.fredholm.empty()) return;
        if (has_no_limit) {
            r.warnings.push_back("Fredholm verdicts not computed: a sampled sequence has no limit operator");
            return;
        }
        for (cplx z : s.fredholm) {
            r.fredholm.push_back(fredholm_test(limits, z, s.union_opts));
            out.spectral_evaluations += 2 * r.fredholm.back().per_limit.size();
        }
    });

    stage("assertions", [&] {
        Context ctx{s, *a, seqs, *probe, limits, ess, direct, out.spectral_evaluations};
        for (const auto& spec : s.assertions) r.assertions.push_back(evaluate_assertion(ctx, spec));
    });
    return out;
}

std::string default_cache_dir() {
    if (const char* c = std::getenv("LIMSPEC_CACHE"); c && *c) return c;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return (fs::path(x) / "limspec").string();
    if (const char* h = std::getenv("HOME"); h && *h) return (fs::path(h) / ".cache" / "limspec").string();
    return (fs::temp_directory_path() / "limspec-cache").string();
}

RunOutput run_scenario(const Scenario& s, const RunOptions& opts) {
    const auto t0 = Clock::now();
    RunOutput out;
    out.info.threads = opts.exec == Exec::parallel ? max_threads() : 1;

    const std::string hash = scenario_hash(s);
    fs::path cache_file;
    if (opts.use_cache) {
        cache_file = fs::path(opts.cache_dir ? *opts.cache_dir : default_cache_dir()) / (hash + ".json");
        out.info.cache_file = cache_file.string();
        std::ifstream in(cache_file, std::ios::binary);
        if (in) {
            try {
                std::ostringstream os;
                os << in.rdbuf();
                out.report = report_from_json(json::parse(os.str()));
                out.info.cache_hit = out.report.hash == hash;
            } catch (const std::exception&) {
                out.info.cache_hit = false;
            }
        }
    }

    if (!out.info.cache_hit) {
        auto res = run_pipeline(s, opts.exec);
        out.report = std::move(res.report);
        out.info.spectral_evaluations = res.spectral_evaluations;
        out.info.stage_seconds = std::move(res.stage_seconds);
        if (opts.use_cache) {
            std::error_code ec;
            fs::create_directories(cache_file.parent_path(), ec);
            try {
                write_atomic(cache_file.string(), to_json(out.report).dump() + "\n");
            } catch (const IoError&) {
                out.info.cache_file.clear();
            }
        }
    }

    out.info.wall_seconds = seconds_since(t0);
    if (!opts.out_dir.empty()) out.files = emit_report(out.report, out.info, s.outputs, opts.out_dir);
    return out;
}

}  // namespace limspec
