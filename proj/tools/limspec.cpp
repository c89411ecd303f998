// limspec: scenario runner, gallery and verification suites.
//
// Exit codes: 0 success, 1 failed assertion or unwritable output,
// 2 configuration error or unknown gallery / suite name.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "limspec/gallery.hpp"
#include "limspec/parallel.hpp"
#include "limspec/pipeline.hpp"
#include "limspec/suites.hpp"

namespace {

using namespace limspec;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_config = 2;

struct Globals {
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool no_cache = false;
};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_report(const RunOutput& res) {
    const Report& r = res.report;
    std::cout << "scenario " << r.scenario << "  hash " << r.hash << (res.info.cache_hit ? "  (cached)" : "") << "\n";
    for (const auto& l : r.limits) {
        std::cout << "  limit " << l.id << ": " << l.kind << " [" << l.mode << "] " << l.provenance;
        if (!l.symbol.empty()) std::cout << " -> " << l.symbol;
        std::cout << "\n";
    }
    if (r.union_estimate) {
        const auto& e = r.union_estimate->estimate;
        std::cout << "  essential spectrum (" << to_string(e.kind) << "):";
        if (e.empty()) std::cout << " empty";
        for (const auto& i : e.intervals) std::cout << " [" << num(i.lo) << ", " << num(i.hi) << "]";
        if (!e.cells.empty()) std::cout << " " << e.cells.size() << " grid cells";
        std::cout << "\n";
    }
    if (r.cross_check) {
        std::cout << "  direct estimate:";
        for (const auto& i : r.cross_check->intervals) std::cout << " [" << num(i.lo) << ", " << num(i.hi) << "]";
        std::cout << "\n";
    }
    for (const auto& v : r.fredholm)
        std::cout << "  fredholm at " << num(v.lambda.real()) << (v.lambda.imag() < 0 ? "-" : "+")
                  << num(std::abs(v.lambda.imag())) << "i: " << (v.fredholm ? "yes" : "no") << "\n";
    for (const auto& w : r.warnings) std::cout << "  warning: " << w << "\n";
    for (const auto& a : r.assertions)
        std::cout << "  " << (a.passed ? "PASS " : "FAIL ") << a.name << "  value " << num(a.value) << "  tolerance "
                  << num(a.tolerance) << "  " << a.detail << "\n";
    for (const auto& f : res.files) std::cout << "  wrote " << f << "\n";
    std::cout << (r.passed() ? "PASSED" : "FAILED") << "  (" << num(res.info.wall_seconds) << " s, "
              << res.info.spectral_evaluations << " spectral evaluations)\n";
}

int execute(Scenario s, const Globals& g) {
    if (g.seed) s.seed = *g.seed;
    RunOptions opts;
    opts.out_dir = g.out.empty() ? (std::filesystem::path("limspec_out") / s.name).string() : g.out;
    opts.use_cache = !g.no_cache;
    const auto res = run_scenario(s, opts);
    print_report(res);
    return res.report.passed() ? exit_ok : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"limspec: essential spectra of lattice operators through limit operators"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--out", g.out, "Output directory for artifacts");
    app.add_option("--seed", g.seed, "Seed (overrides the scenario seed)");
    app.add_option("--threads", g.threads, "OpenMP threads")->check(CLI::PositiveNumber);
    app.add_flag("--no-cache", g.no_cache, "Neither read nor write the result cache");

    std::string config, gallery_name, suite;
    auto* run = app.add_subcommand("run", "Run a scenario config");
    run->add_option("config", config, "Scenario JSON file")->required();
    run->fallthrough();
    auto* gal = app.add_subcommand("gallery", "Run a prebuilt gallery scenario");
    gal->add_option("name", gallery_name, "Gallery name")->required();
    gal->fallthrough();
    auto* ver = app.add_subcommand("verify", "Run a property suite");
    ver->add_option("suite", suite, "lemmas | resolvent | mollifier | all")->required();
    ver->fallthrough();
    auto* lst = app.add_subcommand("list", "List gallery scenarios and suites");
    lst->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }
    if (g.threads > 0) set_threads(g.threads);

    try {
        if (*run) return execute(load_scenario(config), g);
        if (*gal) return execute(gallery_scenario(gallery_name), g);
        if (*ver) {
            const auto results = run_suite(suite, g.seed.value_or(42));
            bool ok = true;
            for (const auto& r : results) {
                std::cout << "suite " << r.suite << " (" << num(r.seconds) << " s)\n";
                for (const auto& c : r.checks)
                    std::cout << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << "  value " << num(c.value)
                              << "  tolerance " << num(c.tolerance) << "  " << c.detail << "\n";
                ok = ok && r.passed();
            }
            std::cout << (ok ? "PASSED" : "FAILED") << "\n";
            return ok ? exit_ok : exit_failed;
        }
        if (*lst) {
            std::cout << "gallery:\n";
            for (const auto& n : gallery_names()) std::cout << "  " << n << "  " << gallery_summary(n) << "\n";
            std::cout << "suites:\n";
            for (const auto& n : suite_names()) std::cout << "  " << n << "\n";
            std::cout << "  all\n";
            return exit_ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return exit_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failed;
    }
    return exit_ok;
}
