#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "limspec/kernel.hpp"
#include "limspec/parallel.hpp"

namespace limspec {

struct SuiteCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteCheck> checks;
    double seconds = 0.0;

    bool passed() const;
};

/// "lemmas", "resolvent", "mollifier"; "all" runs each in turn.
const std::vector<std::string>& suite_names();

/// Throws ConfigError for an unknown name.
std::vector<SuiteResult> run_suite(const std::string& name, std::uint64_t seed, Exec exec = Exec::parallel);

SuiteResult lemma_suite(std::uint64_t seed, Exec exec = Exec::parallel);
SuiteResult resolvent_suite(std::uint64_t seed, Exec exec = Exec::parallel);
SuiteResult mollifier_suite(std::uint64_t seed, Exec exec = Exec::parallel);

/// d = 1 kernel with bandwidth r whose entries are a hash of (seed, x, y - x),
/// scaled so that the Schur bound is at most `norm_bound`. Not translation invariant.
LatticeKernel random_band_kernel(std::uint64_t seed, std::int64_t r, double norm_bound = 2.0);

}  // namespace limspec
