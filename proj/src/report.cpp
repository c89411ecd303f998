#include "limspec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

namespace limspec {

namespace fs = std::filesystem;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double num_of(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return inf;
        if (s == "-inf") return -inf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw Error("report: bad number \"" + s + "\"");
    }
    return j.get<double>();
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> nums_of(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(num_of(x));
    return v;
}

json cx(cplx z) { return json::array({num(z.real()), num(z.imag())}); }
cplx cx_of(const json& j) { return {num_of(j.at(0)), num_of(j.at(1))}; }

json estimate_json(const SpectrumEstimate& e) {
    json iv = json::array(), cells = json::array(), pts = json::array();
    for (const auto& i : e.intervals)
        iv.push_back({{"lo", num(i.lo)}, {"hi", num(i.hi)}, {"exact", i.exact}, {"provenance", i.provenance}});
    for (const auto& c : e.cells)
        cells.push_back(
            {{"center", cx(c.center)}, {"half_width", num(c.half_width)}, {"exact", c.exact}, {"provenance", c.provenance}});
    for (cplx p : e.points) pts.push_back(cx(p));
    return {{"kind", to_string(e.kind)}, {"intervals", iv},      {"cells", cells},
            {"points", pts},             {"tolerance", num(e.tolerance)}, {"provenance", e.provenance}};
}

SpectrumEstimate estimate_of(const json& j) {
    SpectrumEstimate e;
    const auto kind = j.at("kind").get<std::string>();
    for (auto k : {EstimateKind::real_intervals, EstimateKind::complex_cells, EstimateKind::points})
        if (to_string(k) == kind) e.kind = k;
    for (const auto& i : j.at("intervals"))
        e.intervals.push_back({num_of(i.at("lo")), num_of(i.at("hi")), i.at("exact").get<bool>(),
                               i.at("provenance").get<std::string>()});
    for (const auto& c : j.at("cells"))
        e.cells.push_back({cx_of(c.at("center")), num_of(c.at("half_width")), c.at("exact").get<bool>(),
                           c.at("provenance").get<std::string>()});
    for (const auto& p : j.at("points")) e.points.push_back(cx_of(p));
    e.tolerance = num_of(j.at("tolerance"));
    e.provenance = j.at("provenance").get<std::vector<std::string>>();
    return e;
}

Route route_of(const std::string& s) {
    for (auto r : {Route::symbol, Route::fiber, Route::window})
        if (to_string(r) == s) return r;
    throw Error("report: unknown route \"" + s + "\"");
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt("%.12g", v);
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Extent {
    double lo = inf, hi = -inf;
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
    }
};

}  // namespace

LimitRecord record_of(const LimitOperator& l) {
    LimitRecord r;
    r.id = l.id;
    r.kind = to_string(l.kind);
    r.mode = to_string(l.mode);
    r.provenance = l.provenance;
    r.reason = l.reason;
    if (l.symbol) r.symbol = describe(*l.symbol);
    r.certificate = l.certificate;
    r.symbolic_distance = l.symbolic_distance;
    r.agrees_with_symbolic = l.agrees_with_symbolic;
    r.divergence_certified = l.divergence_certified;
    r.resolvent_norms = l.resolvent_norms;
    r.infinity_from = l.infinity_from;
    return r;
}

bool Report::passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const AssertionOutcome& a) { return a.passed; });
}

json to_json(const Report& r) {
    json limits = json::array();
    for (const auto& l : r.limits) {
        json cert = json::array();
        for (const auto& c : l.certificate) cert.push_back({{"n", c.n}, {"point", c.point.to_vector()}, {"gap", num(c.gap)}});
        json o{{"id", l.id},
               {"kind", l.kind},
               {"mode", l.mode},
               {"provenance", l.provenance},
               {"reason", l.reason},
               {"symbol", l.symbol},
               {"certificate", cert},
               {"symbolic_distance", l.symbolic_distance ? num(*l.symbolic_distance) : json(nullptr)},
               {"agrees_with_symbolic", l.agrees_with_symbolic},
               {"divergence_certified", l.divergence_certified},
               {"resolvent_norms", nums(l.resolvent_norms)},
               {"infinity_from", l.infinity_from ? json(*l.infinity_from) : json(nullptr)}};
        limits.push_back(o);
    }
    json doc{{"schema", report_schema},
             {"scenario", r.scenario},
             {"hash", r.hash},
             {"version", r.version},
             {"seed", r.seed},
             {"passed", r.passed()},
             {"limits", limits}};
    if (r.union_estimate) {
        const auto& u = *r.union_estimate;
        json samples = json::array();
        for (const auto& s : u.samples)
            samples.push_back({{"lambda", cx(s.lambda)},
                               {"nu", num(s.nu)},
                               {"nu_adjoint", num(s.nu_adjoint)},
                               {"limit_id", s.limit_id},
                               {"member", s.member}});
        json routes = json::array();
        for (const auto& ro : u.routes)
            routes.push_back({{"limit_id", ro.limit_id}, {"route", to_string(ro.route)}, {"selfadjoint", ro.selfadjoint}});
        doc["union"] = {{"estimate", estimate_json(u.estimate)},
                        {"routes", routes},
                        {"window_side", u.window_side ? json(*u.window_side) : json(nullptr)},
                        {"stabilized", u.stabilized},
                        {"agreement_history", nums(u.agreement_history)},
                        {"samples", samples}};
    } else {
        doc["union"] = nullptr;
    }
    doc["cross_check"] = r.cross_check ? estimate_json(*r.cross_check) : json(nullptr);
    json fr = json::array();
    for (const auto& v : r.fredholm) {
        json per = json::array();
        for (const auto& e : v.per_limit)
            per.push_back({{"limit_id", e.limit_id}, {"nu", num(e.nu)}, {"nu_adjoint", num(e.nu_adjoint)}});
        fr.push_back({{"lambda", cx(v.lambda)},
                      {"fredholm", v.fredholm},
                      {"per_limit", per},
                      {"sup_inverse_norm", num(v.sup_inverse_norm)}});
    }
    doc["fredholm"] = fr;
    json as = json::array();
    for (const auto& a : r.assertions)
        as.push_back({{"name", a.name},
                      {"type", a.type},
                      {"passed", a.passed},
                      {"value", num(a.value)},
                      {"tolerance", num(a.tolerance)},
                      {"detail", a.detail}});
    doc["assertions"] = as;
    doc["warnings"] = r.warnings;
    return doc;
}

Report report_from_json(const json& j) {
    if (j.value("schema", std::string{}) != report_schema) throw Error("report: unsupported schema");
    Report r;
    r.scenario = j.at("scenario").get<std::string>();
    r.hash = j.at("hash").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& o : j.at("limits")) {
        LimitRecord l;
        l.id = o.at("id").get<std::string>();
        l.kind = o.at("kind").get<std::string>();
        l.mode = o.at("mode").get<std::string>();
        l.provenance = o.at("provenance").get<std::string>();
        l.reason = o.at("reason").get<std::string>();
        l.symbol = o.at("symbol").get<std::string>();
        for (const auto& c : o.at("certificate"))
            l.certificate.push_back({c.at("n").get<std::size_t>(),
                                     Point::from_vector(c.at("point").get<std::vector<std::int64_t>>()),
                                     num_of(c.at("gap"))});
        if (!o.at("symbolic_distance").is_null()) l.symbolic_distance = num_of(o.at("symbolic_distance"));
        l.agrees_with_symbolic = o.at("agrees_with_symbolic").get<bool>();
        l.divergence_certified = o.at("divergence_certified").get<bool>();
        l.resolvent_norms = nums_of(o.at("resolvent_norms"));
        if (!o.at("infinity_from").is_null()) l.infinity_from = o.at("infinity_from").get<std::size_t>();
        r.limits.push_back(std::move(l));
    }
    if (!j.at("union").is_null()) {
        const auto& u = j.at("union");
        UnionRecord rec;
        rec.estimate = estimate_of(u.at("estimate"));
        for (const auto& ro : u.at("routes"))
            rec.routes.push_back({ro.at("limit_id").get<std::string>(), route_of(ro.at("route").get<std::string>()),
                                  ro.at("selfadjoint").get<bool>()});
        if (!u.at("window_side").is_null()) rec.window_side = u.at("window_side").get<std::int64_t>();
        rec.stabilized = u.at("stabilized").get<bool>();
        rec.agreement_history = nums_of(u.at("agreement_history"));
        for (const auto& s : u.at("samples"))
            rec.samples.push_back({cx_of(s.at("lambda")), num_of(s.at("nu")), num_of(s.at("nu_adjoint")),
                                   s.at("limit_id").get<std::string>(), s.at("member").get<bool>()});
        r.union_estimate = std::move(rec);
    }
    if (!j.at("cross_check").is_null()) r.cross_check = estimate_of(j.at("cross_check"));
    for (const auto& v : j.at("fredholm")) {
        FredholmVerdict f;
        f.lambda = cx_of(v.at("lambda"));
        f.fredholm = v.at("fredholm").get<bool>();
        for (const auto& e : v.at("per_limit"))
            f.per_limit.push_back({e.at("limit_id").get<std::string>(), num_of(e.at("nu")), num_of(e.at("nu_adjoint"))});
        f.sup_inverse_norm = num_of(v.at("sup_inverse_norm"));
        r.fredholm.push_back(std::move(f));
    }
    for (const auto& a : j.at("assertions"))
        r.assertions.push_back({a.at("name").get<std::string>(), a.at("type").get<std::string>(), a.at("passed").get<bool>(),
                                num_of(a.at("value")), num_of(a.at("tolerance")), a.at("detail").get<std::string>()});
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

json to_json(const RunInfo& info) {
    json stages = json::object();
    for (const auto& [k, v] : info.stage_seconds) stages[k] = v;
    return {{"cache_hit", info.cache_hit},
            {"spectral_evaluations", info.spectral_evaluations},
            {"wall_seconds", info.wall_seconds},
            {"stage_seconds", stages},
            {"threads", info.threads},
            {"cache_file", info.cache_file}};
}

std::string spectrum_csv(const Report& r) {
    std::string out =
        "lambda_re,lambda_im,min_lower_norm,adjoint_min_lower_norm,minimizing_limit_id,in_essential_spectrum\n";
    if (!r.union_estimate) return out;
    for (const auto& s : r.union_estimate->samples) {
        out += csv_number(s.lambda.real()) + "," + csv_number(s.lambda.imag()) + "," + csv_number(s.nu) + "," +
               csv_number(s.nu_adjoint) + "," + s.limit_id + "," + (s.member ? "true" : "false") + "\n";
    }
    return out;
}

std::string spectrum_svg(const SpectrumEstimate& e, const std::string& title, const std::vector<LambdaSample>& samples) {
    const bool planar = e.kind == EstimateKind::complex_cells ||
                        (e.kind == EstimateKind::points &&
                         std::any_of(e.points.begin(), e.points.end(), [](cplx p) { return p.imag() != 0.0; }));
    Extent xr, yr;
    for (const auto& s : samples) {
        xr.add(s.lambda.real());
        yr.add(s.lambda.imag());
    }
    for (const auto& i : e.intervals) {
        xr.add(i.lo);
        xr.add(i.hi);
    }
    for (const auto& c : e.cells) {
        xr.add(c.center.real() - c.half_width);
        xr.add(c.center.real() + c.half_width);
        yr.add(c.center.imag() - c.half_width);
        yr.add(c.center.imag() + c.half_width);
    }
    for (cplx p : e.points) {
        xr.add(p.real());
        yr.add(p.imag());
    }
    xr.finish();
    yr.finish();

    const double width = 640, pad = 40;
    const double height = planar ? 640 : 160;
    const double plot_w = width - 2 * pad, plot_h = height - 2 * pad;
    auto sx = [&](double x) { return pad + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto sy = [&](double y) { return height - pad - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<title>" << xml_escape(title) << "</title>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
    const double axis_y = planar ? sy(std::clamp(0.0, yr.lo, yr.hi)) : height / 2;
    os << "<line x1=\"" << fmt("%.2f", pad) << "\" y1=\"" << fmt("%.2f", axis_y) << "\" x2=\"" << fmt("%.2f", width - pad)
       << "\" y2=\"" << fmt("%.2f", axis_y) << "\"/>\n";
    if (planar) {
        const double axis_x = sx(std::clamp(0.0, xr.lo, xr.hi));
        os << "<line x1=\"" << fmt("%.2f", axis_x) << "\" y1=\"" << fmt("%.2f", pad) << "\" x2=\"" << fmt("%.2f", axis_x)
           << "\" y2=\"" << fmt("%.2f", height - pad) << "\"/>\n";
    }
    os << "</g>\n<g class=\"ticks\" font-family=\"monospace\" font-size=\"10\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = xr.lo + (xr.hi - xr.lo) * k / 4.0;
        os << "<text x=\"" << fmt("%.2f", sx(x)) << "\" y=\"" << fmt("%.2f", axis_y + 14) << "\" text-anchor=\"middle\">"
           << fmt("%.3g", x) << "</text>\n";
    }
    if (planar)
        for (int k = 0; k <= 4; ++k) {
            const double y = yr.lo + (yr.hi - yr.lo) * k / 4.0;
            os << "<text x=\"" << fmt("%.2f", pad - 4) << "\" y=\"" << fmt("%.2f", sy(y)) << "\" text-anchor=\"end\">"
               << fmt("%.3g", y) << "</text>\n";
        }
    os << "</g>\n<g class=\"estimate\" fill=\"steelblue\" fill-opacity=\"0.7\">\n";
    for (const auto& i : e.intervals) {
        const double x0 = sx(i.lo), x1 = std::max(sx(i.hi), x0 + 1.0);
        os << "<rect class=\"interval\" x=\"" << fmt("%.2f", x0) << "\" y=\"" << fmt("%.2f", axis_y - 10) << "\" width=\""
           << fmt("%.2f", x1 - x0) << "\" height=\"20\"/>\n";
    }
    for (const auto& c : e.cells) {
        const double x0 = sx(c.center.real() - c.half_width), x1 = sx(c.center.real() + c.half_width);
        const double y0 = sy(c.center.imag() + c.half_width), y1 = sy(c.center.imag() - c.half_width);
        os << "<rect class=\"cell\" x=\"" << fmt("%.2f", x0) << "\" y=\"" << fmt("%.2f", y0) << "\" width=\""
           << fmt("%.2f", x1 - x0) << "\" height=\"" << fmt("%.2f", y1 - y0) << "\"/>\n";
    }
    for (cplx p : e.points)
        os << "<circle class=\"point\" cx=\"" << fmt("%.2f", sx(p.real())) << "\" cy=\""
           << fmt("%.2f", planar ? sy(p.imag()) : axis_y) << "\" r=\"2\"/>\n";
    os << "</g>\n";
    const std::string caption = e.empty() ? title + ": empty estimate" : title;
    os << "<text class=\"caption\" x=\"" << fmt("%.2f", width / 2) << "\" y=\"20\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(caption) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp." + std::to_string(static_cast<long>(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path);
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("cannot write " + path);
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot write " + path);
    }
}

std::vector<std::string> emit_report(const Report& r, const RunInfo& info, const std::vector<std::string>& formats,
                                     const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& content) {
        const auto path = (fs::path(dir) / name).string();
        write_atomic(path, content);
        written.push_back(path);
    };
    auto wants = [&](const char* f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
    if (wants("json")) put("report.json", to_json(r).dump(2) + "\n");
    if (wants("csv")) put("spectrum.csv", spectrum_csv(r));
    if (wants("svg")) {
        if (r.union_estimate)
            put("spectrum.svg", spectrum_svg(r.union_estimate->estimate, r.scenario + ": essential spectrum (limit union)",
                                             r.union_estimate->samples));
        else
            put("spectrum.svg", spectrum_svg({}, r.scenario + ": no essential spectrum claim"));
        if (r.cross_check) put("cross_check.svg", spectrum_svg(*r.cross_check, r.scenario + ": direct window estimate"));
    }
    put("run_info.json", to_json(info).dump(2) + "\n");
    return written;
}

}  // namespace limspec
