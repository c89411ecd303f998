#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "limspec/lattice.hpp"

namespace limspec {

struct PotentialSymbol;
using SymbolPtr = std::shared_ptr<const PotentialSymbol>;

namespace symbol {

struct Constant {
    cplx value{};
};

/// v -> 0 at infinity with |v(x)| <= envelope(|x|_inf).
struct Decaying {
    std::function<cplx(const Point&)> rule;
    std::function<double(double)> envelope;
    double sup_abs = 0.0;
    std::string name;
};

/// d = 1; |rule(x) - c_±| <= envelope(|x|) for ±x large.
struct TwoSidedLimits {
    std::function<double(double)> rule;
    double c_minus = 0.0;
    double c_plus = 0.0;
    std::function<double(double)> envelope;
    std::string name;
};

/// d = 1; height m on [m^2 - m, m^2), zero on [m^2, m^2 + m), `negative_value` for x < 0.
struct Plateau {
    double negative_value = 0.0;
};

/// d = 1; v(x) = |x|^a * omega(|x|^theta), omega 1-periodic, vanishing on Z, omega(t) ~ lambda |t|^mu.
struct ModulatedPower {
    double a = 0.0;
    double theta = 0.5;
    double lambda = 1.0;
    double mu = 2.0;
    std::function<double(double)> omega;
};

/// d = 1; v(x) = slope * x.
struct AffineRamp {
    double slope = 1.0;
};

/// d = 1; v(x) = exp(i x^2).
struct OscillatoryPhase {};

/// v(x) = radial(|x|_inf), radial -> +inf.
struct Coercive {
    std::function<double(double)> radial;
    std::string name;
};

/// d = 1; v(x) = values[x mod p].
struct Periodic {
    std::vector<cplx> values;
};

/// d = 1 limit symbol: 0 on x >= 0, +inf on x < 0 (the operator lives on the half-line).
struct Wall {};

/// d = 1 limit symbol: lambda * |theta * q + c|^mu.
struct Well {
    double lambda = 1.0;
    double theta = 0.5;
    double c = 0.0;
    double mu = 2.0;
};

/// One term v_Y(P x) of an N-body potential; P is a k x d integer matrix
/// realizing the quotient map, sub-symbol has dimension k.
struct SeparableTerm {
    std::vector<std::vector<std::int64_t>> projection;
    SymbolPtr sub;
};

struct Separable {
    std::vector<SeparableTerm> terms;
};

}  // namespace symbol

struct PotentialSymbol {
    using Variant = std::variant<symbol::Constant, symbol::Decaying, symbol::TwoSidedLimits, symbol::Plateau,
                                 symbol::ModulatedPower, symbol::AffineRamp, symbol::OscillatoryPhase,
                                 symbol::Coercive, symbol::Periodic, symbol::Wall, symbol::Well,
                                 symbol::Separable>;
    Variant v;
    int dim = 1;

    template <class T>
    const T* as() const { return std::get_if<T>(&v); }
    template <class T>
    bool is() const { return std::holds_alternative<T>(v); }
};

// Factories for the named shapes used by scenarios and tests.
PotentialSymbol constant_potential(cplx value, int dim = 1);
PotentialSymbol decaying_inverse_square(cplx amplitude, double scale, int dim = 1);
PotentialSymbol decaying_gaussian(cplx amplitude, double width, int dim = 1);
/// Compactly supported bump: amplitude on |x|_inf <= radius, zero elsewhere.
PotentialSymbol decaying_bump(cplx amplitude, std::int64_t radius, int dim = 1);
PotentialSymbol two_sided_tanh(double c_minus, double c_plus, double width);
PotentialSymbol plateau(double negative_value = 0.0);
/// omega(t) = lambda |sin(pi t) / pi|^mu.
PotentialSymbol modulated_power(double a, double theta, double lambda, double mu);
PotentialSymbol affine_ramp(double slope);
PotentialSymbol oscillatory_phase();
PotentialSymbol coercive_log(double scale = 1.0, int dim = 1);
PotentialSymbol coercive_abs(double scale = 1.0, int dim = 1);
PotentialSymbol periodic(std::vector<cplx> values);
PotentialSymbol wall();
PotentialSymbol well(double lambda, double theta, double c, double mu);
PotentialSymbol separable(int dim, std::vector<symbol::SeparableTerm> terms);
symbol::SeparableTerm separable_term(std::vector<std::vector<std::int64_t>> projection, PotentialSymbol sub);

/// Value at a lattice point. Wall returns +inf on x < 0.
cplx evaluate(const PotentialSymbol& v, const Point& x);

/// Real-argument evaluation of a d = 1 ModulatedPower (used for level-set sequences).
double evaluate_real(const symbol::ModulatedPower& v, double x);

/// True for symbols whose modulus is unbounded on Z^d (requires a clamp policy).
bool is_unbounded(const PotentialSymbol& v);

/// True when every value is real.
bool is_real(const PotentialSymbol& v);

/// Upper bound for sup |v| over the window (analytic where the symbol is unbounded).
double sup_abs_on(const PotentialSymbol& v, const Window& w);

/// Upper bound for sup |v| over the whole lattice; +inf for unbounded symbols.
double sup_abs(const PotentialSymbol& v);

/// Sampled check of the ModulatedPower invariants on omega.
bool check_modulated_power(const symbol::ModulatedPower& v, double rel_tol = 0.05);

/// Human-readable one-line description used in provenance strings.
std::string describe(const PotentialSymbol& v);

/// Translation-invariance class used by the spectra module.
enum class SymbolClass { constant, periodic, other };
SymbolClass classify(const PotentialSymbol& v);

/// Coordinates the symbol actually depends on (bitmask over 0..dim-1).
unsigned dependence_mask(const PotentialSymbol& v);

/// Collapse Separable symbols whose terms are all constant (recursively) to a Constant.
PotentialSymbol simplify(const PotentialSymbol& v);

}  // namespace limspec
