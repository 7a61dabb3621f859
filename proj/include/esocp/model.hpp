#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace esocp {

/// Drift regime of the stock. State 1 is absorbing.
enum class Regime : int { pre_switch = 0, post_switch = 1 };

inline constexpr int index(Regime regime) { return static_cast<int>(regime); }

/// Raw market and contract constants. Rates are annualized decimals.
struct ModelParams {
    double mu0 = 0.02;      ///< drift before the change point
    double mu1 = -0.02;     ///< drift after the change point
    double sigma = 0.30;    ///< volatility
    double lambda = 0.10;   ///< change-point intensity
    double r = 0.025;       ///< risk-free rate
    double strike = 100.0;
    double maturity = 10.0; ///< years
    double spot = 100.0;
    double y0 = 0.0;        ///< prior probability that the switch already happened
};

struct DerivedConstants {
    double eta = 0.0;   ///< (mu0 - mu1) / sigma
    double nu0 = 0.0;   ///< mu0 / sigma - sigma / 2
    double nu1 = 0.0;   ///< mu1 / sigma - sigma / 2
    double kappa = 0.0; ///< lambda + eta * nu0 - eta^2 / 2
};

/// Validated parameters together with their derived constants.
struct Model {
    ModelParams params;
    DerivedConstants derived;
};

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// `allow_equal` admits mu0 == mu1 (no change in drift); only used for
/// degenerate no-early-exercise checks.
enum class DriftOrdering { strict, allow_equal };

DerivedConstants derived(const ModelParams& params);

/// Throws ModelError naming the violated constraint.
Model validate(const ModelParams& params, DriftOrdering ordering = DriftOrdering::strict);

/// Parses flat `key = value` text. Keys: mu0, mu1, sigma, lambda, r, strike,
/// maturity, spot, y0. `#` starts a comment. A trailing '%' divides by 100.
/// Keys missing from the text keep the values of `defaults`.
ModelParams parse_params(std::istream& in, const ModelParams& defaults = {});

/// Reads a parameter file; throws std::runtime_error naming the path if it cannot be opened.
ModelParams read_params_file(const std::filesystem::path& path, const ModelParams& defaults = {});

/// Parses a single numeric value, honouring a trailing '%'.
double parse_number(const std::string& text);

void write_params(std::ostream& out, const ModelParams& params);

}  // namespace esocp
