#pragma once

#include <optional>
#include <string>
#include <vector>

#include "limspec/parallel.hpp"
#include "limspec/report.hpp"
#include "limspec/scenario.hpp"

namespace limspec {

struct PipelineResult {
    Report report;
    std::size_t spectral_evaluations = 0;
    std::vector<std::pair<std::string, double>> stage_seconds;
};

/// build -> limits -> spectra -> verdicts -> assertions. Pure: no files.
PipelineResult run_pipeline(const Scenario& s, Exec exec = Exec::parallel);

struct RunOptions {
    std::string out_dir;  // empty: no artifacts
    bool use_cache = true;
    std::optional<std::string> cache_dir;  // default: default_cache_dir()
    Exec exec = Exec::parallel;
};

struct RunOutput {
    Report report;
    RunInfo info;
    std::vector<std::string> files;
};

/// LIMSPEC_CACHE, else $XDG_CACHE_HOME/limspec, else $HOME/.cache/limspec.
std::string default_cache_dir();

/// Runs (or loads from the cache) and emits the requested artifacts. An
/// unreadable cache entry counts as a miss; a failed cache write never fails
/// the run.
RunOutput run_scenario(const Scenario& s, const RunOptions& opts);

}  // namespace limspec
