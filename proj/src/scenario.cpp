#include "limspec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#ifndef LIMSPEC_VERSION
#define LIMSPEC_VERSION "0.0.0"
#endif

namespace limspec {

const char* library_version() { return LIMSPEC_VERSION; }

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path.empty() ? "<root>" : path, what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

std::int64_t integer(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    }
    fail(path, "expected an integer");
}

std::int64_t positive(const json& j, const std::string& path) {
    const auto v = integer(j, path);
    if (v <= 0) fail(path, "must be positive");
    return v;
}

double positive_number(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0)) fail(path, "must be positive");
    return v;
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

cplx complex(const json& j, const std::string& path) {
    if (j.is_number()) return {number(j, path), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], index(path, 0)), number(j[1], index(path, 1))};
    fail(path, "expected a number or [re, im]");
}

json complex_json(cplx z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

const json& array(const json& j, const std::string& path, bool nonempty = false) {
    if (!j.is_array()) fail(path, "expected an array");
    if (nonempty && j.empty()) fail(path, "must not be empty");
    return j;
}

std::vector<double> numbers(const json& j, const std::string& path, bool nonempty = true) {
    std::vector<double> out;
    const auto& a = array(j, path, nonempty);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number(a[i], index(path, i)));
    return out;
}

std::vector<std::int64_t> integers(const json& j, const std::string& path, bool nonempty = true) {
    std::vector<std::int64_t> out;
    const auto& a = array(j, path, nonempty);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(integer(a[i], index(path, i)));
    return out;
}

/// Object accessor that records which keys were read; finish() rejects the rest.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    const json& required(const std::string& key) {
        if (!has(key)) fail(join(path_, key), "missing required field");
        return j_.at(key);
    }
    const json* optional(const std::string& key) { return has(key) ? &j_.at(key) : nullptr; }
    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fail(join(path_, k), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

double number_or(Fields& f, const std::string& key, double def) {
    const json* j = f.optional(key);
    return j ? number(*j, f.path(key)) : def;
}

std::int64_t integer_or(Fields& f, const std::string& key, std::int64_t def) {
    const json* j = f.optional(key);
    return j ? integer(*j, f.path(key)) : def;
}

bool bool_or(Fields& f, const std::string& key, bool def) {
    const json* j = f.optional(key);
    return j ? boolean(*j, f.path(key)) : def;
}

// ---------------------------------------------------------------------------
// Canonical sub-documents
// ---------------------------------------------------------------------------

json canonical_hop(const json& j, const std::string& path, int dim) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "laplacian") return name;
        if (name == "shift") {
            if (dim != 1) fail(path, "shift requires dim 1");
            return name;
        }
        fail(path, "unknown hop \"" + name + "\" (expected laplacian, shift or a coefficient list)");
    }
    json out = json::array();
    const auto& a = array(j, path, true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto p = index(path, i);
        Fields f(a[i], p);
        auto offset = integers(f.required("offset"), f.path("offset"));
        if (static_cast<int>(offset.size()) != dim) fail(f.path("offset"), "length must equal operator.dim");
        const cplx value = complex(f.required("value"), f.path("value"));
        f.finish();
        out.push_back({{"offset", offset}, {"value", complex_json(value)}});
    }
    return out;
}

json canonical_potential(const json& j, const std::string& path, int dim);

json canonical_separable(Fields& f, int dim) {
    json terms = json::array();
    const auto& a = array(f.required("terms"), f.path("terms"), true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto p = index(f.path("terms"), i);
        Fields t(a[i], p);
        const auto& rows = array(t.required("projection"), t.path("projection"), true);
        json proj = json::array();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto row = integers(rows[r], index(t.path("projection"), r));
            if (static_cast<int>(row.size()) != dim) fail(index(t.path("projection"), r), "length must equal operator.dim");
            proj.push_back(row);
        }
        const int sub_dim = static_cast<int>(rows.size());
        if (sub_dim > max_dim) fail(t.path("projection"), "at most 3 rows");
        json sub = canonical_potential(t.required("potential"), t.path("potential"), sub_dim);
        t.finish();
        terms.push_back({{"projection", proj}, {"potential", sub}});
    }
    return {{"type", "separable"}, {"terms", terms}};
}

json canonical_potential(const json& j, const std::string& path, int dim) {
    Fields f(j, path);
    const auto type = string(f.required("type"), f.path("type"));
    auto one_d = [&] {
        if (dim != 1) fail(path, type + " potentials require dimension 1");
    };
    json out;
    if (type == "constant") {
        out = {{"type", type}, {"value", complex_json(complex(f.required("value"), f.path("value")))}};
    } else if (type == "decaying") {
        const auto shape = string(f.required("shape"), f.path("shape"));
        if (shape != "inverse_square" && shape != "gaussian" && shape != "bump")
            fail(f.path("shape"), "expected inverse_square, gaussian or bump");
        const cplx amp = complex(f.required("amplitude"), f.path("amplitude"));
        json scale;
        if (shape == "bump") {
            const auto r = integer(f.required("scale"), f.path("scale"));
            if (r < 0) fail(f.path("scale"), "must be nonnegative");
            scale = r;
        } else {
            scale = positive_number(f.required("scale"), f.path("scale"));
        }
        out = {{"type", type}, {"shape", shape}, {"amplitude", complex_json(amp)}, {"scale", scale}};
    } else if (type == "two_sided") {
        one_d();
        out = {{"type", type},
               {"c_minus", number(f.required("c_minus"), f.path("c_minus"))},
               {"c_plus", number(f.required("c_plus"), f.path("c_plus"))},
               {"width", f.has("width") ? positive_number(*f.optional("width"), f.path("width")) : 1.0}};
    } else if (type == "plateau") {
        one_d();
        const double nv = number_or(f, "negative_value", 0.0);
        if (nv < 0) fail(f.path("negative_value"), "must be nonnegative");
        out = {{"type", type}, {"negative_value", nv}};
    } else if (type == "modulated_power") {
        one_d();
        const double a = number(f.required("a"), f.path("a"));
        const double theta = number(f.required("theta"), f.path("theta"));
        if (a < 0) fail(f.path("a"), "must be nonnegative");
        if (!(theta > 0 && theta < 1)) fail(f.path("theta"), "must lie in (0, 1)");
        const double lambda = number_or(f, "lambda", 1.0);
        const double mu = number_or(f, "mu", 2.0);
        if (!(lambda > 0)) fail(f.path("lambda"), "must be positive");
        if (!(mu > 0)) fail(f.path("mu"), "must be positive");
        out = {{"type", type}, {"a", a}, {"theta", theta}, {"lambda", lambda}, {"mu", mu}};
    } else if (type == "affine_ramp") {
        one_d();
        out = {{"type", type}, {"slope", number_or(f, "slope", 1.0)}};
    } else if (type == "oscillatory_phase") {
        one_d();
        out = {{"type", type}};
    } else if (type == "coercive") {
        const auto shape = string(f.required("shape"), f.path("shape"));
        if (shape != "log" && shape != "abs") fail(f.path("shape"), "expected log or abs");
        const double scale = number_or(f, "scale", 1.0);
        if (!(scale > 0)) fail(f.path("scale"), "must be positive");
        out = {{"type", type}, {"shape", shape}, {"scale", scale}};
    } else if (type == "periodic") {
        one_d();
        const auto& a = array(f.required("values"), f.path("values"), true);
        json values = json::array();
        for (std::size_t i = 0; i < a.size(); ++i) values.push_back(complex_json(complex(a[i], index(f.path("values"), i))));
        out = {{"type", type}, {"values", values}};
    } else if (type == "separable") {
        out = canonical_separable(f, dim);
    } else {
        fail(f.path("type"),
             "unknown potential type \"" + type +
                 "\" (expected constant, decaying, two_sided, plateau, modulated_power, affine_ramp, "
                 "oscillatory_phase, coercive, periodic or separable)");
    }
    f.finish();
    return out;
}

json canonical_sequence(const json& j, const std::string& path, int dim) {
    Fields f(j, path);
    const auto type = string(f.required("type"), f.path("type"));
    json out{{"type", type}};
    if (const json* l = f.optional("label")) out["label"] = string(*l, f.path("label"));
    auto increasing = [&](const std::vector<double>& r, const std::string& p) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i] > 0)) fail(index(p, i), "radii must be positive");
            if (i && !(r[i] > r[i - 1])) fail(index(p, i), "radii must increase strictly");
        }
    };
    if (type == "ray") {
        auto alpha = numbers(f.required("alpha"), f.path("alpha"));
        if (static_cast<int>(alpha.size()) != dim) fail(f.path("alpha"), "length must equal operator.dim");
        double n = 0;
        for (double a : alpha) n += a * a;
        if (!(n > 0)) fail(f.path("alpha"), "must be nonzero");
        auto radii = numbers(f.required("radii"), f.path("radii"));
        increasing(radii, f.path("radii"));
        out["alpha"] = alpha;
        out["radii"] = radii;
    } else if (type == "directions") {
        if (dim != 2) fail(path, "directions requires dimension 2");
        out["count"] = positive(f.required("count"), f.path("count"));
        auto radii = numbers(f.required("radii"), f.path("radii"));
        increasing(radii, f.path("radii"));
        out["radii"] = radii;
    } else if (type == "plateau_centers") {
        if (dim != 1) fail(path, "plateau_centers requires dimension 1");
        auto n = integers(f.required("n"), f.path("n"));
        for (std::size_t i = 0; i < n.size(); ++i)
            if (n[i] <= 0) fail(index(f.path("n"), i), "must be positive");
        out["n"] = n;
        out["midpoints"] = bool_or(f, "midpoints", false);
    } else if (type == "fractional_target") {
        if (dim != 1) fail(path, "fractional_target requires dimension 1");
        out["c"] = number(f.required("c"), f.path("c"));
        out["count"] = f.has("count") ? positive(*f.optional("count"), f.path("count")) : 8;
        out["m_start"] = f.has("m_start") ? positive_number(*f.optional("m_start"), f.path("m_start")) : 16.0;
        const double growth = number_or(f, "growth", 2.0);
        if (!(growth > 1)) fail(f.path("growth"), "must exceed 1");
        out["growth"] = growth;
    } else if (type == "explicit") {
        const auto& pts = array(f.required("points"), f.path("points"), true);
        json list = json::array();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto p = integers(pts[i], index(f.path("points"), i));
            if (static_cast<int>(p.size()) != dim) fail(index(f.path("points"), i), "length must equal operator.dim");
            list.push_back(p);
        }
        out["points"] = list;
    } else {
        fail(f.path("type"), "unknown sequence type \"" + type +
                                 "\" (expected ray, directions, plateau_centers, fractional_target or explicit)");
    }
    f.finish();
    return out;
}

// Assertion parameters: kind n = number, i = integer, b = bool, s = string,
// c = complex, a = array. A null default marks a required field.
struct ParamSpec {
    const char* name;
    char kind;
    json def;
};

const std::vector<std::pair<std::string, std::vector<ParamSpec>>>& assertion_table() {
    static const std::vector<std::pair<std::string, std::vector<ParamSpec>>> table{
        {"limit_count", {{"equals", 'i', nullptr}}},
        {"limits_all", {{"kind", 's', nullptr}}},
        {"limits_agree", {}},
        {"no_limit_certified", {}},
        {"essential_spectrum", {{"intervals", 'a', nullptr}, {"max_hausdorff", 'n', 0.05}}},
        {"essential_spectrum_empty", {}},
        {"no_essential_claim", {}},
        {"cross_check", {{"max_hausdorff", 'n', 0.05}}},
        {"covers", {{"lo", 'n', nullptr}, {"hi", 'n', nullptr}, {"edge", 'n', 0.05}}},
        {"circle", {{"radius", 'n', 1.0}, {"within", 'n', 0.05}, {"exclude", 'n', 0.2}}},
        {"window_pollution", {{"center", 'a', nullptr}, {"side", 'i', 64}, {"min_distance", 'n', 0.4}}},
        {"plateau_resolvent",
         {{"n", 'a', json::array({10, 20, 40})},
          {"side", 'i', 41},
          {"z", 'c', -1.0},
          {"max", 'n', 1e-3},
          {"margin", 'i', 20}}},
        {"well_eigenvalues",
         {{"c", 'a', nullptr},
          {"m", 'n', 1000.0},
          {"side", 'i', 41},
          {"count", 'i', 3},
          {"max", 'n', 1e-2},
          {"reference_side", 'i', 201}}},
        {"infinity_detected", {{"max_norm", 'n', 0.1}}},
        {"eigenvalue_counts", {{"sides", 'a', json::array({256, 512, 1024})}, {"max_level", 'i', 3}}},
        {"directional_independence", {}},
        {"fredholm", {{"lambda", 'c', nullptr}, {"expect", 'b', nullptr}}},
    };
    return table;
}

json canonical_param(const ParamSpec& p, const json& j, const std::string& path) {
    switch (p.kind) {
        case 'n': return number(j, path);
        case 'i': return integer(j, path);
        case 'b': return boolean(j, path);
        case 's': return string(j, path);
        case 'c': return complex_json(complex(j, path));
        default: return array(j, path, true);
    }
}

json canonical_assertion(const json& j, const std::string& path) {
    Fields f(j, path);
    const auto type = string(f.required("type"), f.path("type"));
    const auto& table = assertion_table();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == type; });
    if (it == table.end()) {
        std::string names;
        for (const auto& e : table) names += (names.empty() ? "" : ", ") + e.first;
        fail(f.path("type"), "unknown assertion type \"" + type + "\" (expected one of " + names + ")");
    }
    json out{{"type", type}};
    out["name"] = f.has("name") ? string(*f.optional("name"), f.path("name")) : type;
    for (const auto& p : it->second) {
        if (const json* v = f.optional(p.name))
            out[p.name] = canonical_param(p, *v, f.path(p.name));
        else if (p.def.is_null())
            fail(f.path(p.name), "missing required field");
        else
            out[p.name] = p.def;
    }
    if (type == "limits_all") {
        const auto k = out["kind"].get<std::string>();
        if (k != "finite" && k != "infinity" && k != "no_limit")
            fail(f.path("kind"), "expected finite, infinity or no_limit");
    }
    if (type == "essential_spectrum") {
        const auto& a = out["intervals"];
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto v = numbers(a[i], index(f.path("intervals"), i));
            if (v.size() != 2 || v[0] > v[1]) fail(index(f.path("intervals"), i), "expected [lo, hi] with lo <= hi");
        }
    }
    f.finish();
    return out;
}

LambdaGrid parse_grid(const json& j, const std::string& path) {
    Fields f(j, path);
    const double step = positive_number(f.required("step"), f.path("step"));
    const json* re = f.optional("real");
    const json* bx = f.optional("box");
    if ((re != nullptr) == (bx != nullptr)) fail(path, "exactly one of \"real\" and \"box\" is required");
    LambdaGrid g;
    if (re) {
        auto v = numbers(*re, f.path("real"));
        if (v.size() != 2 || !(v[0] < v[1])) fail(f.path("real"), "expected [lo, hi] with lo < hi");
        g = LambdaGrid::real(v[0], v[1], step);
    } else {
        auto v = numbers(*bx, f.path("box"));
        if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3]))
            fail(f.path("box"), "expected [re_lo, re_hi, im_lo, im_hi] with lo < hi");
        g = LambdaGrid::box(v[0], v[1], v[2], v[3], step);
    }
    f.finish();
    return g;
}

json grid_json(const LambdaGrid& g) {
    if (g.complex_grid) return {{"box", {g.re_lo, g.re_hi, g.im_lo, g.im_hi}}, {"step", g.step}};
    return {{"real", {g.re_lo, g.re_hi}}, {"step", g.step}};
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

PotentialSymbol build_potential(const json& p, int dim) {
    const auto type = p.at("type").get<std::string>();
    auto cx = [](const json& j) { return j.is_number() ? cplx{j.get<double>(), 0.0} : cplx{j[0].get<double>(), j[1].get<double>()}; };
    if (type == "constant") return constant_potential(cx(p.at("value")), dim);
    if (type == "decaying") {
        const auto shape = p.at("shape").get<std::string>();
        const cplx amp = cx(p.at("amplitude"));
        if (shape == "inverse_square") return decaying_inverse_square(amp, p.at("scale").get<double>(), dim);
        if (shape == "gaussian") return decaying_gaussian(amp, p.at("scale").get<double>(), dim);
        return decaying_bump(amp, p.at("scale").get<std::int64_t>(), dim);
    }
    if (type == "two_sided")
        return two_sided_tanh(p.at("c_minus").get<double>(), p.at("c_plus").get<double>(), p.at("width").get<double>());
    if (type == "plateau") return plateau(p.at("negative_value").get<double>());
    if (type == "modulated_power")
        return modulated_power(p.at("a").get<double>(), p.at("theta").get<double>(), p.at("lambda").get<double>(),
                               p.at("mu").get<double>());
    if (type == "affine_ramp") return affine_ramp(p.at("slope").get<double>());
    if (type == "oscillatory_phase") return oscillatory_phase();
    if (type == "coercive") {
        const double scale = p.at("scale").get<double>();
        return p.at("shape").get<std::string>() == "log" ? coercive_log(scale, dim) : coercive_abs(scale, dim);
    }
    if (type == "periodic") {
        std::vector<cplx> values;
        for (const auto& v : p.at("values")) values.push_back(cx(v));
        return periodic(std::move(values));
    }
    if (type == "separable") {
        std::vector<symbol::SeparableTerm> terms;
        for (const auto& t : p.at("terms")) {
            auto proj = t.at("projection").get<std::vector<std::vector<std::int64_t>>>();
            const int sub_dim = static_cast<int>(proj.size());
            terms.push_back(separable_term(std::move(proj), build_potential(t.at("potential"), sub_dim)));
        }
        return separable(dim, std::move(terms));
    }
    throw ConfigError("operator.potential.type", "unknown potential type \"" + type + "\"");
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) { return to_json(a) == to_json(b); }

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("line " + std::to_string(line) + " column " + std::to_string(column), "JSON syntax error");
    }
    return parse_scenario(doc);
}

Scenario parse_scenario(const json& doc) {
    Fields top(doc, "");
    const auto schema = string(top.required("schema"), "schema");
    if (schema != scenario_schema) fail("schema", std::string("unsupported schema (expected \"") + scenario_schema + "\")");

    Scenario s;
    s.name = string(top.required("name"), "name");
    if (s.name.empty()) fail("name", "must not be empty");
    if (const json* d = top.optional("description")) s.description = string(*d, "description");
    if (const json* seed = top.optional("seed")) {
        if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
            fail("seed", "expected a nonnegative integer");
        s.seed = seed->get<std::uint64_t>();
    }
    if (const json* cap = top.optional("dense_cap")) s.dense_cap = static_cast<std::size_t>(positive(*cap, "dense_cap"));

    {
        Fields op(top.required("operator"), "operator");
        const auto dim = integer(op.required("dim"), "operator.dim");
        if (dim < 1 || dim > max_dim) fail("operator.dim", "must be 1, 2 or 3");
        s.op.dim = static_cast<int>(dim);
        s.op.hop = canonical_hop(op.required("hop"), "operator.hop", s.op.dim);
        s.op.potential = op.has("potential") ? canonical_potential(*op.optional("potential"), "operator.potential", s.op.dim)
                                             : json{{"type", "constant"}, {"value", 0.0}};
        if (const json* form = op.optional("form")) {
            s.op.form = string(*form, "operator.form");
            if (s.op.form != "sum" && s.op.form != "product") fail("operator.form", "expected sum or product");
        }
        s.op.selfadjoint = bool_or(op, "selfadjoint", false);
        if (const json* c = op.optional("clamp_side")) s.op.clamp_side = positive(*c, "operator.clamp_side");
        if (const json* m = op.optional("mollify")) {
            const double eps = number(*m, "operator.mollify");
            if (!(eps > 0 && eps <= 1)) fail("operator.mollify", "must lie in (0, 1]");
            s.op.mollify = eps;
        }
        op.finish();
        try {
            const auto v = build_potential(s.op.potential, s.op.dim);
            if (is_unbounded(v) && !s.op.clamp_side)
                fail("operator.clamp_side", "required for unbounded potentials");
        } catch (const PreconditionError& e) {
            fail("operator.potential", e.what());
        }
    }

    if (const json* seqs = top.optional("sequences")) {
        const auto& a = array(*seqs, "sequences");
        for (std::size_t i = 0; i < a.size(); ++i)
            s.sequences.push_back({canonical_sequence(a[i], index("sequences", i), s.op.dim)});
    }

    if (const json* p = top.optional("probe")) {
        Fields f(*p, "probe");
        if (const json* r = f.optional("radius")) s.probe.radius = positive(*r, "probe.radius");
        if (const json* b = f.optional("base")) {
            s.probe.base = number(*b, "probe.base");
            if (!(s.probe.base > 1)) fail("probe.base", "must exceed 1");
        }
        f.finish();
    }

    if (const json* l = top.optional("limits")) {
        Fields f(*l, "limits");
        if (const json* v = f.optional("tol")) s.limits.tol = positive_number(*v, "limits.tol");
        if (const json* v = f.optional("agreement_tol")) s.limits.agreement_tol = positive_number(*v, "limits.agreement_tol");
        if (const json* v = f.optional("infinity_tol")) s.limits.infinity_tol = positive_number(*v, "limits.infinity_tol");
        if (const json* v = f.optional("resolvent_margin")) s.limits.resolvent_margin = positive(*v, "limits.resolvent_margin");
        if (const json* v = f.optional("z0")) s.limits.z0 = complex(*v, "limits.z0");
        f.finish();
    }

    if (const json* g = top.optional("grid")) s.grid = parse_grid(*g, "grid");

    s.union_opts.dense_cap = s.dense_cap;
    if (const json* u = top.optional("union")) {
        Fields f(*u, "union");
        if (const json* v = f.optional("tol")) s.union_opts.tol = positive_number(*v, "union.tol");
        if (const json* v = f.optional("window_sides")) {
            s.union_opts.window_sides.clear();
            const auto& a = array(*v, "union.window_sides", true);
            for (std::size_t i = 0; i < a.size(); ++i)
                s.union_opts.window_sides.push_back(positive(a[i], index("union.window_sides", i)));
        }
        if (const json* v = f.optional("agreement")) {
            s.union_opts.agreement = number(*v, "union.agreement");
            if (!(s.union_opts.agreement > 0 && s.union_opts.agreement <= 1)) fail("union.agreement", "must lie in (0, 1]");
        }
        if (const json* v = f.optional("symbol_samples"))
            s.union_opts.symbol_samples = static_cast<std::size_t>(positive(*v, "union.symbol_samples"));
        if (const json* v = f.optional("fiber_samples"))
            s.union_opts.fiber_samples = static_cast<std::size_t>(positive(*v, "union.fiber_samples"));
        f.finish();
    }

    if (const json* d = top.optional("direct")) {
        Fields f(*d, "direct");
        DirectSpec spec;
        const auto& ws = array(f.required("windows"), "direct.windows", true);
        for (std::size_t i = 0; i < ws.size(); ++i) {
            const auto p = index("direct.windows", i);
            Fields w(ws[i], p);
            auto center = integers(w.required("center"), w.path("center"));
            if (static_cast<int>(center.size()) != s.op.dim) fail(w.path("center"), "length must equal operator.dim");
            const auto side = positive(w.required("side"), w.path("side"));
            w.finish();
            spec.windows.emplace_back(std::move(center), side);
        }
        spec.boundary_mass = number_or(f, "boundary_mass", spec.boundary_mass);
        if (!(spec.boundary_mass > 0 && spec.boundary_mass <= 1)) fail("direct.boundary_mass", "must lie in (0, 1]");
        spec.margin = integer_or(f, "margin", spec.margin);
        if (spec.margin < 0) fail("direct.margin", "must be nonnegative");
        spec.merge_tol = number_or(f, "merge_tol", spec.merge_tol);
        if (spec.merge_tol < 0) fail("direct.merge_tol", "must be nonnegative");
        f.finish();
        s.direct = std::move(spec);
    }

    if (const json* fr = top.optional("fredholm")) {
        const auto& a = array(*fr, "fredholm");
        for (std::size_t i = 0; i < a.size(); ++i) s.fredholm.push_back(complex(a[i], index("fredholm", i)));
    }

    if (const json* o = top.optional("outputs")) {
        s.outputs.clear();
        const auto& a = array(*o, "outputs");
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto v = string(a[i], index("outputs", i));
            if (v != "csv" && v != "json" && v != "svg") fail(index("outputs", i), "expected csv, json or svg");
            if (std::find(s.outputs.begin(), s.outputs.end(), v) == s.outputs.end()) s.outputs.push_back(v);
        }
    }

    if (const json* as = top.optional("assertions")) {
        const auto& a = array(*as, "assertions");
        for (std::size_t i = 0; i < a.size(); ++i) s.assertions.push_back(canonical_assertion(a[i], index("assertions", i)));
    }

    top.finish();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot read file");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_scenario(os.str());
}

json to_json(const Scenario& s) {
    json doc;
    doc["schema"] = scenario_schema;
    doc["name"] = s.name;
    doc["description"] = s.description;
    doc["seed"] = s.seed;
    doc["dense_cap"] = s.dense_cap;

    json op{{"dim", s.op.dim},
            {"hop", s.op.hop},
            {"potential", s.op.potential},
            {"form", s.op.form},
            {"selfadjoint", s.op.selfadjoint}};
    if (s.op.clamp_side) op["clamp_side"] = *s.op.clamp_side;
    if (s.op.mollify) op["mollify"] = *s.op.mollify;
    doc["operator"] = op;

    json seqs = json::array();
    for (const auto& q : s.sequences) seqs.push_back(q.spec);
    doc["sequences"] = seqs;
    doc["probe"] = {{"radius", s.probe.radius}, {"base", s.probe.base}};

    json limits{{"tol", s.limits.tol},
                {"agreement_tol", s.limits.agreement_tol},
                {"infinity_tol", s.limits.infinity_tol},
                {"resolvent_margin", s.limits.resolvent_margin}};
    if (s.limits.z0) limits["z0"] = complex_json(*s.limits.z0);
    doc["limits"] = limits;

    if (s.grid) doc["grid"] = grid_json(*s.grid);
    doc["union"] = {{"tol", s.union_opts.tol},
                    {"window_sides", s.union_opts.window_sides},
                    {"agreement", s.union_opts.agreement},
                    {"symbol_samples", s.union_opts.symbol_samples},
                    {"fiber_samples", s.union_opts.fiber_samples}};
    if (s.direct) {
        json ws = json::array();
        for (const auto& [c, side] : s.direct->windows) ws.push_back({{"center", c}, {"side", side}});
        doc["direct"] = {{"windows", ws},
                         {"boundary_mass", s.direct->boundary_mass},
                         {"margin", s.direct->margin},
                         {"merge_tol", s.direct->merge_tol}};
    }
    json fr = json::array();
    for (cplx z : s.fredholm) fr.push_back(complex_json(z));
    doc["fredholm"] = fr;
    doc["outputs"] = s.outputs;
    doc["assertions"] = s.assertions;
    return doc;
}

std::string scenario_hash(const Scenario& s) {
    char buf[17];
    const auto h = fnv1a(to_json(s).dump() + "|" + library_version() + "|" + std::to_string(s.seed));
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

HopMap make_hop(const json& hop, int dim) {
    if (hop.is_string()) return hop.get<std::string>() == "shift" ? shift_hops() : laplacian_hops(dim);
    HopMap out;
    for (const auto& e : hop) {
        const auto& v = e.at("value");
        const cplx value = v.is_number() ? cplx{v.get<double>(), 0.0} : cplx{v[0].get<double>(), v[1].get<double>()};
        out.emplace_back(Point::from_vector(e.at("offset").get<std::vector<std::int64_t>>()), value);
    }
    return out;
}

PotentialSymbol make_potential(const json& canonical, int dim) { return build_potential(canonical, dim); }

LatticeKernel make_operator(const Scenario& s) {
    const auto hop = make_hop(s.op.hop, s.op.dim);
    const auto v = make_potential(s.op.potential, s.op.dim);
    BuildOptions opts;
    opts.selfadjoint = s.op.selfadjoint;
    if (s.op.clamp_side) opts.clamp_window = Window::centered(zero_point(s.op.dim), *s.op.clamp_side);
    LatticeKernel a = [&] {
        if (s.op.form == "sum") return build_schrodinger(hop, v, opts);
        BuildOptions mult = opts;
        mult.selfadjoint = false;
        return compose(build_schrodinger({}, v, mult), build_schrodinger(hop, constant_potential(0.0, s.op.dim)));
    }();
    if (s.op.mollify) a = band_mollify(a, *s.op.mollify);
    return a;
}

std::vector<DirectionSequence> make_sequences(const Scenario& s) {
    std::vector<DirectionSequence> out;
    for (const auto& q : s.sequences) {
        const json& j = q.spec;
        const auto type = j.at("type").get<std::string>();
        const std::string label = j.value("label", std::string{});
        if (type == "ray") {
            out.push_back(ray_sequence(j.at("alpha").get<std::vector<double>>(), j.at("radii").get<std::vector<double>>(),
                                       label));
        } else if (type == "directions") {
            const auto count = j.at("count").get<std::int64_t>();
            const auto radii = j.at("radii").get<std::vector<double>>();
            for (std::int64_t k = 0; k < count; ++k) {
                const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
                // Exact axis directions keep separable limits on their symbolic route.
                std::vector<double> alpha{std::cos(t), std::sin(t)};
                for (double& a : alpha)
                    if (std::abs(a) < 1e-12) a = 0.0;
                out.push_back(ray_sequence(alpha, radii, label.empty() ? "" : label + "[" + std::to_string(k) + "]"));
            }
        } else if (type == "plateau_centers") {
            out.push_back(plateau_centers(j.at("n").get<std::vector<std::int64_t>>(), j.at("midpoints").get<bool>(), label));
        } else if (type == "fractional_target") {
            out.push_back(fractional_target(j.at("c").get<double>(), j.at("count").get<std::size_t>(),
                                            j.at("m_start").get<double>(), j.at("growth").get<double>(), label));
        } else {
            std::vector<Point> pts;
            for (const auto& p : j.at("points")) pts.push_back(Point::from_vector(p.get<std::vector<std::int64_t>>()));
            out.push_back(explicit_sequence(std::move(pts), label));
        }
    }
    return out;
}

LocalProbe make_probe(const Scenario& s) { return LocalProbe::exponential(s.op.dim, s.probe.radius, s.probe.base); }

const std::vector<std::string>& assertion_types() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : assertion_table()) n.push_back(e.first);
        return n;
    }();
    return names;
}

}  // namespace limspec
