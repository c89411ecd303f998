#include "limspec/gallery.hpp"

#include <algorithm>
#include <utility>

namespace limspec {

namespace {

struct Entry {
    const char* name;
    const char* source;
};

// Each entry is a complete scenario document with its acceptance assertions.
const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries{
        {"plateau", R"({
  "schema": "limspec/1",
  "name": "plateau",
  "description": "Laplacian plus staircase plateaus: far translates localize to a Dirichlet half-line",
  "operator": {"dim": 1, "hop": "laplacian", "potential": {"type": "plateau"}, "selfadjoint": true, "clamp_side": 101},
  "sequences": [
    {"type": "plateau_centers", "n": [10, 20, 40, 80, 160, 320, 640, 1280]},
    {"type": "plateau_centers", "n": [10, 20, 40, 80, 160, 320, 640, 1280], "midpoints": true}
  ],
  "grid": {"real": [-1, 5], "step": 0.01},
  "assertions": [
    {"type": "limits_all", "kind": "finite"},
    {"type": "essential_spectrum", "intervals": [[0, 4]], "max_hausdorff": 0.05},
    {"type": "plateau_resolvent", "n": [10, 20, 40], "side": 41, "z": -1, "max": 1e-3}
  ]
})"},
        {"three-regime-1", R"({
  "schema": "limspec/1",
  "name": "three-regime-1",
  "description": "x^a omega(x^theta), subcritical growth: constant limits fill a half-line",
  "operator": {"dim": 1, "hop": "laplacian",
               "potential": {"type": "modulated_power", "a": 0.5, "theta": 0.5, "lambda": 1, "mu": 2},
               "selfadjoint": true, "clamp_side": 101},
  "sequences": [
    {"type": "fractional_target", "c": 0, "count": 9, "m_start": 1000, "growth": 4},
    {"type": "fractional_target", "c": 2, "count": 9, "m_start": 1000, "growth": 4},
    {"type": "fractional_target", "c": 4, "count": 9, "m_start": 1000, "growth": 4},
    {"type": "fractional_target", "c": 6, "count": 9, "m_start": 1000, "growth": 4},
    {"type": "fractional_target", "c": 8, "count": 9, "m_start": 1000, "growth": 4}
  ],
  "grid": {"real": [-1, 11], "step": 0.01},
  "assertions": [
    {"type": "limits_all", "kind": "finite"},
    {"type": "limits_agree"},
    {"type": "covers", "lo": 0, "hi": 10, "edge": 0.05}
  ]
})"},
        {"three-regime-2", R"({
  "schema": "limspec/1",
  "name": "three-regime-2",
  "description": "x^a omega(x^theta), critical growth: limits are anharmonic wells with discrete spectra",
  "operator": {"dim": 1, "hop": "laplacian",
               "potential": {"type": "modulated_power", "a": 1, "theta": 0.5, "lambda": 1, "mu": 2},
               "selfadjoint": true, "clamp_side": 101},
  "sequences": [
    {"type": "fractional_target", "c": 0, "count": 6, "m_start": 100, "growth": 4},
    {"type": "fractional_target", "c": 0.5, "count": 6, "m_start": 100, "growth": 4},
    {"type": "fractional_target", "c": 1, "count": 6, "m_start": 100, "growth": 4}
  ],
  "assertions": [
    {"type": "limits_all", "kind": "finite"},
    {"type": "well_eigenvalues", "c": [0, 0.5, 1], "m": 1000, "side": 41, "count": 3, "max": 1e-2}
  ]
})"},
        {"three-regime-3", R"({
  "schema": "limspec/1",
  "name": "three-regime-3",
  "description": "x^a omega(x^theta), supercritical growth: every localization is infinity",
  "operator": {"dim": 1, "hop": "laplacian",
               "potential": {"type": "modulated_power", "a": 4, "theta": 0.7071067811865476, "lambda": 1, "mu": 2},
               "selfadjoint": true, "clamp_side": 101},
  "sequences": [
    {"type": "fractional_target", "c": 0, "count": 6, "m_start": 16, "growth": 2},
    {"type": "ray", "alpha": [1], "radii": [50, 100, 200, 400, 800, 1600]},
    {"type": "ray", "alpha": [-1], "radii": [50, 100, 200, 400, 800, 1600]}
  ],
  "grid": {"real": [-1, 10], "step": 0.01},
  "assertions": [
    {"type": "infinity_detected", "max_norm": 0.1},
    {"type": "essential_spectrum_empty"}
  ]
})"},
        {"two-sided", R"({
  "schema": "limspec/1",
  "name": "two-sided",
  "description": "Laplacian plus a potential with different limits at the two ends",
  "operator": {"dim": 1, "hop": "laplacian",
               "potential": {"type": "two_sided", "c_minus": 0, "c_plus": 2, "width": 3}, "selfadjoint": true},
  "sequences": [
    {"type": "ray", "alpha": [1], "radii": [100, 200, 400, 800, 1600]},
    {"type": "ray", "alpha": [-1], "radii": [100, 200, 400, 800, 1600]}
  ],
  "grid": {"real": [-1, 7], "step": 0.01},
  "direct": {"windows": [{"center": [100], "side": 128}, {"center": [-100], "side": 128},
                         {"center": [200], "side": 128}, {"center": [-200], "side": 128}]},
  "fredholm": [-0.5, 3, 7],
  "assertions": [
    {"type": "limit_count", "equals": 2},
    {"type": "limits_agree"},
    {"type": "essential_spectrum", "intervals": [[0, 6]], "max_hausdorff": 0.05},
    {"type": "cross_check", "max_hausdorff": 0.05},
    {"type": "fredholm", "lambda": -0.5, "expect": true},
    {"type": "fredholm", "lambda": 3, "expect": false}
  ]
})"},
        {"shift-circle", R"({
  "schema": "limspec/1",
  "name": "shift-circle",
  "description": "Bilateral shift plus a decaying complex potential: the unit circle, missed by finite sections",
  "operator": {"dim": 1, "hop": "shift",
               "potential": {"type": "decaying", "shape": "gaussian", "amplitude": [0.5, 0.5], "scale": 3}},
  "sequences": [
    {"type": "ray", "alpha": [1], "radii": [100, 200, 400, 800, 1600]},
    {"type": "ray", "alpha": [-1], "radii": [100, 200, 400, 800, 1600]}
  ],
  "grid": {"box": [-1.5, 1.5, -1.5, 1.5], "step": 0.05},
  "fredholm": [0, [1, 0]],
  "assertions": [
    {"type": "limit_count", "equals": 1},
    {"type": "circle", "radius": 1, "within": 0.05, "exclude": 0.2},
    {"type": "window_pollution", "center": [200], "side": 64, "min_distance": 0.4},
    {"type": "fredholm", "lambda": 0, "expect": true},
    {"type": "fredholm", "lambda": 1, "expect": false}
  ]
})"},
        {"nbody2d", R"({
  "schema": "limspec/1",
  "name": "nbody2d",
  "description": "Two-dimensional Laplacian plus a well in each coordinate: directional limits and channel union",
  "operator": {"dim": 2, "hop": "laplacian", "selfadjoint": true,
               "potential": {"type": "separable", "terms": [
                 {"projection": [[1, 0]], "potential": {"type": "decaying", "shape": "gaussian", "amplitude": -1.5, "scale": 2}},
                 {"projection": [[0, 1]], "potential": {"type": "decaying", "shape": "gaussian", "amplitude": -1, "scale": 2}}]}},
  "sequences": [{"type": "directions", "count": 16, "radii": [20, 40, 80, 160]}],
  "probe": {"radius": 5},
  "grid": {"real": [-2, 9], "step": 0.01},
  "union": {"tol": 0.03},
  "direct": {"windows": [{"center": [200, 0], "side": 40}, {"center": [0, 200], "side": 40},
                         {"center": [-200, 0], "side": 40}, {"center": [0, -200], "side": 40},
                         {"center": [150, 150], "side": 40}],
             "boundary_mass": 0.3},
  "assertions": [
    {"type": "limit_count", "equals": 3},
    {"type": "limits_agree"},
    {"type": "cross_check", "max_hausdorff": 0.05},
    {"type": "directional_independence"}
  ]
})"},
        {"stark-demo", R"({
  "schema": "limspec/1",
  "name": "stark-demo",
  "description": "Laplacian plus a linear ramp: translates diverge and no essential spectrum is claimed",
  "operator": {"dim": 1, "hop": "laplacian", "potential": {"type": "affine_ramp", "slope": 1},
               "selfadjoint": true, "clamp_side": 101},
  "sequences": [
    {"type": "ray", "alpha": [1], "radii": [10, 20, 40, 80, 160, 320]},
    {"type": "ray", "alpha": [-1], "radii": [10, 20, 40, 80, 160, 320]}
  ],
  "assertions": [
    {"type": "infinity_detected", "max_norm": 0.1},
    {"type": "no_essential_claim"}
  ]
})"},
        {"oscillatory-demo", R"({
  "schema": "limspec/1",
  "name": "oscillatory-demo",
  "description": "Multiplication by exp(i x^2) composed with the shift: translates never settle",
  "operator": {"dim": 1, "hop": "shift", "potential": {"type": "oscillatory_phase"}, "form": "product", "mollify": 0.5},
  "sequences": [{"type": "ray", "alpha": [1], "radii": [10, 20, 40, 80, 160, 320, 640, 1280]}],
  "assertions": [
    {"type": "limits_all", "kind": "no_limit"},
    {"type": "no_limit_certified"}
  ]
})"},
        {"discrete-criterion", R"({
  "schema": "limspec/1",
  "name": "discrete-criterion",
  "description": "Laplacian plus log(1 + |x|): all localizations are infinity, the spectrum is discrete",
  "operator": {"dim": 1, "hop": "laplacian", "potential": {"type": "coercive", "shape": "log"},
               "selfadjoint": true, "clamp_side": 101},
  "sequences": [
    {"type": "ray", "alpha": [1], "radii": [100, 1000, 10000, 100000, 1000000]},
    {"type": "ray", "alpha": [-1], "radii": [100, 1000, 10000, 100000, 1000000]}
  ],
  "grid": {"real": [-1, 10], "step": 0.01},
  "assertions": [
    {"type": "infinity_detected", "max_norm": 0.1},
    {"type": "essential_spectrum_empty"},
    {"type": "eigenvalue_counts", "sides": [256, 512, 1024], "max_level": 3}
  ]
})"},
    };
    return entries;
}

const Entry* find(const std::string& name) {
    const auto& r = registry();
    auto it = std::find_if(r.begin(), r.end(), [&](const Entry& e) { return name == e.name; });
    return it == r.end() ? nullptr : &*it;
}

}  // namespace

const std::vector<std::string>& gallery_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : registry()) n.emplace_back(e.name);
        return n;
    }();
    return names;
}

std::string gallery_source(const std::string& name) {
    if (const Entry* e = find(name)) return e->source;
    std::string list;
    for (const auto& n : gallery_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("gallery", "unknown gallery name \"" + name + "\" (available: " + list + ")");
}

std::string gallery_summary(const std::string& name) { return gallery_scenario(name).description; }

Scenario gallery_scenario(const std::string& name) { return parse_scenario(gallery_source(name)); }

}  // namespace limspec
