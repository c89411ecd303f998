#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "limspec/limit_ops.hpp"
#include "limspec/scenario.hpp"
#include "limspec/spectra.hpp"

namespace limspec {

inline constexpr const char* report_schema = "limspec-report/1";

/// Unwritable output path or cache entry.
class IoError : public Error {
public:
    using Error::Error;
};

struct LimitRecord {
    std::string id;
    std::string kind;
    std::string mode;
    std::string provenance;
    std::string reason;
    std::string symbol;  // describe() of the limit potential, empty if unknown
    std::vector<CauchyEntry> certificate;
    std::optional<double> symbolic_distance;
    bool agrees_with_symbolic = true;
    bool divergence_certified = false;
    std::vector<double> resolvent_norms;
    std::optional<std::size_t> infinity_from;

    friend bool operator==(const LimitRecord&, const LimitRecord&) = default;
};

LimitRecord record_of(const LimitOperator& l);

struct UnionRecord {
    std::vector<LambdaSample> samples;
    SpectrumEstimate estimate;
    std::vector<RouteInfo> routes;
    std::optional<std::int64_t> window_side;
    bool stabilized = true;
    std::vector<double> agreement_history;

    friend bool operator==(const UnionRecord&, const UnionRecord&) = default;
};

struct AssertionOutcome {
    std::string name;
    std::string type;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;  // the threshold `value` was judged against
    std::string detail;

    friend bool operator==(const AssertionOutcome&, const AssertionOutcome&) = default;
};

/// Deterministic result of a scenario: identical config and seed give an
/// identical report. Timings live in RunInfo.
struct Report {
    std::string scenario;
    std::string hash;
    std::string version;
    std::uint64_t seed = 0;
    std::vector<LimitRecord> limits;
    std::optional<UnionRecord> union_estimate;
    std::optional<SpectrumEstimate> cross_check;
    std::vector<FredholmVerdict> fredholm;
    std::vector<AssertionOutcome> assertions;
    std::vector<std::string> warnings;

    bool passed() const;
    friend bool operator==(const Report&, const Report&) = default;
};

/// Per-invocation facts: not part of the cached report.
struct RunInfo {
    bool cache_hit = false;
    std::size_t spectral_evaluations = 0;  // lower-norm and eigen solves performed by this run
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, double>> stage_seconds;
    int threads = 1;
    std::string cache_file;  // empty when caching is off
};

/// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
json to_json(const Report& r);
Report report_from_json(const json& j);
json to_json(const RunInfo& info);

/// Header lambda_re,lambda_im,min_lower_norm,adjoint_min_lower_norm,minimizing_limit_id,in_essential_spectrum
/// and one row per grid sample (header only without a union estimate).
std::string spectrum_csv(const Report& r);

/// Real-line interval plot or complex cell scatter. Axes follow `samples`
/// when given, the estimate's extent otherwise; an empty estimate draws the
/// axes with a caption.
std::string spectrum_svg(const SpectrumEstimate& e, const std::string& title,
                         const std::vector<LambdaSample>& samples = {});

/// Writes the requested formats ("csv", "json", "svg") plus run_info.json
/// into `dir` (created if needed). Returns the written paths. Throws IoError.
std::vector<std::string> emit_report(const Report& r, const RunInfo& info, const std::vector<std::string>& formats,
                                     const std::string& dir);

/// Writes `content` to a temporary sibling, then renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace limspec
