#pragma once

#include "esocp/model.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <variant>

namespace esocp {

/// Closed-form infinite-horizon values under full information.
///
/// Regime 1 is a perpetual call with threshold x1 = K gamma / (gamma - 1).
/// Regime 0 solves an ODE coupled to v1 and has three branches:
///   x < x1:        E (x1 - K) (x/x1)^gamma + F (x/x1)^beta
///   x1 <= x < x0:  A x + B + C (x/x0)^beta + D (x/x1)^{-delta}
///   x >= x0:       x - K
/// with x0 the root of (A-1)(beta-1) x0 + (beta+delta) D (x1/x0)^delta + beta (K+B) = 0.
struct PerpetualSolution {
    double strike = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
    double E = 0.0;
    double F = 0.0;
    double x1 = 0.0;
    double x0 = 0.0;
    int bisection_iterations = 0;
};

/// Returned instead of a solution when a threshold is infinite (mu1 >= r, or mu0 >= r).
struct NoFiniteBoundary {
    std::string reason;
};

using PerpetualOutcome = std::variant<PerpetualSolution, NoFiniteBoundary>;

class DegenerateParameters : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Throws DegenerateParameters naming the violated non-degeneracy condition, or
/// std::runtime_error when no sign change for x0 is found within 60 doublings.
PerpetualOutcome solve_perpetual(const Model& model);

/// Left-hand side of the x0 equation; zero at the solved threshold.
double x0_equation(const PerpetualSolution& sol, double x0);

double eval_v1(const PerpetualSolution& sol, double x);
double eval_v0(const PerpetualSolution& sol, double x);

/// First and second price-derivatives of the closed forms (analytic, branch by position).
double eval_v1_prime(const PerpetualSolution& sol, double x);
double eval_v1_second(const PerpetualSolution& sol, double x);
double eval_v0_prime(const PerpetualSolution& sol, double x);
double eval_v0_second(const PerpetualSolution& sol, double x);

struct OdeResiduals {
    double state1 = 0.0;  ///< max |mu1 x v1' + sigma^2 x^2 v1'' / 2 - r v1| over samples below x1
    double state0 = 0.0;  ///< max |mu0 x v0' + sigma^2 x^2 v0'' / 2 - r v0 - lambda (v0 - v1)| below x0
};

/// Samples must lie in (0, x0), else std::invalid_argument. The state-1 residual uses only
/// the samples below x1.
OdeResiduals verify_odes(const Model& model, const PerpetualSolution& sol, std::span<const double> xs);

/// Residuals of value matching / smooth pasting at x0 and C^1 continuity of v0 at x1.
struct MatchingResiduals {
    double value_at_x0 = 0.0;
    double slope_at_x0 = 0.0;
    double value_at_x1 = 0.0;
    double slope_at_x1 = 0.0;
};

MatchingResiduals matching_residuals(const PerpetualSolution& sol);

}  // namespace esocp
