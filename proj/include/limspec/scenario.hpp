#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "limspec/kernel.hpp"
#include "limspec/limit_ops.hpp"
#include "limspec/spectra.hpp"

namespace limspec {

using json = nlohmann::json;

inline constexpr const char* scenario_schema = "limspec/1";

/// Library version string, part of every cache key.
const char* library_version();

/// Invalid scenario document. `where` is "line L column C" for syntax errors
/// and the dotted field path otherwise.
class ConfigError : public Error {
public:
    ConfigError(std::string where, const std::string& what)
        : Error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct OperatorSpec {
    int dim = 1;
    json hop;        // "laplacian" | "shift" | [{"offset": [...], "value": x | [re, im]}]
    json potential;  // canonical potential object
    std::string form = "sum";  // "sum": hop + v; "product": v(x) hop(y - x)
    bool selfadjoint = false;
    std::optional<std::int64_t> clamp_side;
    std::optional<double> mollify;

    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

struct SequenceSpec {
    json spec;  // canonical sequence object
    friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

struct ProbeSpec {
    std::int64_t radius = 10;
    double base = 2.0;
    friend bool operator==(const ProbeSpec&, const ProbeSpec&) = default;
};

struct DirectSpec {
    std::vector<std::pair<std::vector<std::int64_t>, std::int64_t>> windows;  // (center, side)
    double boundary_mass = 0.1;
    std::int64_t margin = 2;
    double merge_tol = 0.05;
    friend bool operator==(const DirectSpec&, const DirectSpec&) = default;
};

struct Scenario {
    std::string name;
    std::string description;
    std::uint64_t seed = 0;
    std::size_t dense_cap = default_dense_cap;
    OperatorSpec op;
    std::vector<SequenceSpec> sequences;
    ProbeSpec probe;
    NumericLimitOptions limits;
    std::optional<LambdaGrid> grid;
    UnionOptions union_opts;
    std::optional<DirectSpec> direct;
    std::vector<cplx> fredholm;
    std::vector<std::string> outputs{"csv", "json", "svg"};
    std::vector<json> assertions;  // canonical assertion objects
};

bool operator==(const Scenario& a, const Scenario& b);

/// Parses and validates a scenario document. Unknown fields are errors.
Scenario parse_scenario(const std::string& text);
Scenario parse_scenario(const json& doc);
Scenario load_scenario(const std::string& path);

/// Canonical document: every field present, defaults filled in.
json to_json(const Scenario& s);

/// FNV-1a of the canonical document, the library version and the seed.
std::string scenario_hash(const Scenario& s);

HopMap make_hop(const json& hop, int dim);
PotentialSymbol make_potential(const json& canonical, int dim);
LatticeKernel make_operator(const Scenario& s);
std::vector<DirectionSequence> make_sequences(const Scenario& s);
LocalProbe make_probe(const Scenario& s);

/// Assertion types understood by the pipeline.
const std::vector<std::string>& assertion_types();

}  // namespace limspec
