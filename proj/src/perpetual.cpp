#include "esocp/perpetual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace esocp {

namespace {

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double x0_equation(const PerpetualSolution& s, double x0) {
    return (s.A - 1.0) * (s.beta - 1.0) * x0 + (s.beta + s.delta) * s.D * std::pow(s.x1 / x0, s.delta) +
           s.beta * (s.strike + s.B);
}

PerpetualOutcome solve_perpetual(const Model& model) {
    const ModelParams& p = model.params;
    const DerivedConstants& d = model.derived;
    const double sigma = p.sigma;
    const double K = p.strike;

    if (p.mu1 >= p.r) {
        return NoFiniteBoundary{"no finite exercise boundary: mu1 >= r, the state-1 threshold is infinite"};
    }
    if (nearly_equal(p.mu0, p.r + p.lambda)) {
        throw DegenerateParameters("degenerate parameters: mu0 == r + lambda");
    }
    if (p.mu0 >= p.r) {
        return NoFiniteBoundary{"no finite exercise boundary: mu0 >= r, the state-0 threshold is infinite"};
    }

    PerpetualSolution s;
    s.strike = K;
    s.gamma = (std::sqrt(d.nu1 * d.nu1 + 2.0 * p.r) - d.nu1) / sigma;
    if (nearly_equal(p.lambda, sigma * d.eta * s.gamma)) {
        throw DegenerateParameters("degenerate parameters: lambda == sigma * eta * gamma");
    }
    s.beta = (std::sqrt(d.nu0 * d.nu0 + 2.0 * (p.r + p.lambda)) - d.nu0) / sigma;
    s.delta = s.beta + 2.0 * d.nu0 / sigma;
    // Affine particular solution of mu0 x v' + sigma^2 x^2 v''/2 - (r+lambda) v = -lambda (x - K).
    s.A = p.lambda / (p.r + p.lambda - p.mu0);
    s.B = -p.lambda * K / (p.r + p.lambda);
    s.E = p.lambda / (p.lambda - sigma * d.eta * s.gamma);
    s.x1 = K * s.gamma / (s.gamma - 1.0);
    s.D = (s.E * (s.x1 - K) * (s.beta - s.gamma) + s.A * s.x1 - s.beta * (s.A * s.x1 + s.B)) / (s.beta + s.delta);

    double lo = s.x1;
    const double f_lo = x0_equation(s, lo);
    double hi = lo;
    int doublings = 0;
    if (f_lo != 0.0) {
        while (true) {
            if (doublings == 60) {
                std::ostringstream msg;
                msg << "no sign change of the x0 equation between x1 = " << s.x1 << " and " << hi;
                throw std::runtime_error(msg.str());
            }
            hi *= 2.0;
            ++doublings;
            const double f_hi = x0_equation(s, hi);
            if (f_hi == 0.0 || std::signbit(f_hi) != std::signbit(f_lo)) break;
            lo = hi;
        }
        // bisect to machine precision
        if (x0_equation(s, hi) != 0.0) {
            while (true) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                ++s.bisection_iterations;
                const double f_mid = x0_equation(s, mid);
                if (f_mid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(f_mid) == std::signbit(f_lo)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            s.x0 = std::abs(x0_equation(s, lo)) <= std::abs(x0_equation(s, hi)) ? lo : hi;
        } else {
            s.x0 = hi;
        }
    } else {
        s.x0 = lo;
    }

    s.C = ((1.0 - s.A) * (1.0 + s.delta) * s.x0 - s.delta * (K + s.B)) / (s.beta + s.delta);
    s.F = s.A * s.x1 + s.B + s.C * std::pow(s.x1 / s.x0, s.beta) + s.D - s.E * (s.x1 - K);
    return s;
}

double eval_v1(const PerpetualSolution& s, double x) {
    if (x >= s.x1) return x - s.strike;
    return (s.x1 - s.strike) * std::pow(x / s.x1, s.gamma);
}

double eval_v1_prime(const PerpetualSolution& s, double x) {
    if (x >= s.x1) return 1.0;
    return (s.x1 - s.strike) * s.gamma * std::pow(x / s.x1, s.gamma) / x;
}

double eval_v1_second(const PerpetualSolution& s, double x) {
    if (x >= s.x1) return 0.0;
    return (s.x1 - s.strike) * s.gamma * (s.gamma - 1.0) * std::pow(x / s.x1, s.gamma) / (x * x);
}

namespace {

double middle(const PerpetualSolution& s, double x) {
    return s.A * x + s.B + s.C * std::pow(x / s.x0, s.beta) + s.D * std::pow(x / s.x1, -s.delta);
}
double middle_prime(const PerpetualSolution& s, double x) {
    return s.A + (s.C * s.beta * std::pow(x / s.x0, s.beta) - s.D * s.delta * std::pow(x / s.x1, -s.delta)) / x;
}
double middle_second(const PerpetualSolution& s, double x) {
    return (s.C * s.beta * (s.beta - 1.0) * std::pow(x / s.x0, s.beta) +
            s.D * s.delta * (s.delta + 1.0) * std::pow(x / s.x1, -s.delta)) /
           (x * x);
}
double lower(const PerpetualSolution& s, double x) {
    return s.E * (s.x1 - s.strike) * std::pow(x / s.x1, s.gamma) + s.F * std::pow(x / s.x1, s.beta);
}
double lower_prime(const PerpetualSolution& s, double x) {
    return (s.E * (s.x1 - s.strike) * s.gamma * std::pow(x / s.x1, s.gamma) +
            s.F * s.beta * std::pow(x / s.x1, s.beta)) /
           x;
}
double lower_second(const PerpetualSolution& s, double x) {
    return (s.E * (s.x1 - s.strike) * s.gamma * (s.gamma - 1.0) * std::pow(x / s.x1, s.gamma) +
            s.F * s.beta * (s.beta - 1.0) * std::pow(x / s.x1, s.beta)) /
           (x * x);
}

}  // namespace

double eval_v0(const PerpetualSolution& s, double x) {
    if (x >= s.x0) return x - s.strike;
    if (x >= s.x1) return middle(s, x);
    if (x <= 0.0) return 0.0;
    return lower(s, x);
}

double eval_v0_prime(const PerpetualSolution& s, double x) {
    if (x >= s.x0) return 1.0;
    if (x >= s.x1) return middle_prime(s, x);
    return lower_prime(s, x);
}

double eval_v0_second(const PerpetualSolution& s, double x) {
    if (x >= s.x0) return 0.0;
    if (x >= s.x1) return middle_second(s, x);
    return lower_second(s, x);
}

OdeResiduals verify_odes(const Model& model, const PerpetualSolution& s, std::span<const double> xs) {
    const ModelParams& p = model.params;
    const double half_var = 0.5 * p.sigma * p.sigma;
    OdeResiduals res;
    for (const double x : xs) {
        if (!(x > 0.0 && x < s.x0)) throw std::invalid_argument("ODE sample outside the state-0 continuation region");
        const double v0 = eval_v0(s, x);
        const double v1 = eval_v1(s, x);
        const double r0 = p.mu0 * x * eval_v0_prime(s, x) + half_var * x * x * eval_v0_second(s, x) - p.r * v0 -
                          p.lambda * (v0 - v1);
        res.state0 = std::max(res.state0, std::abs(r0));
        if (x < s.x1) {
            const double r1 = p.mu1 * x * eval_v1_prime(s, x) + half_var * x * x * eval_v1_second(s, x) - p.r * v1;
            res.state1 = std::max(res.state1, std::abs(r1));
        }
    }
    return res;
}

MatchingResiduals matching_residuals(const PerpetualSolution& s) {
    MatchingResiduals m;
    m.value_at_x0 = std::abs(middle(s, s.x0) - (s.x0 - s.strike)) / std::max(1.0, s.x0);
    m.slope_at_x0 = std::abs(middle_prime(s, s.x0) - 1.0);
    m.value_at_x1 = std::abs(lower(s, s.x1) - middle(s, s.x1)) / std::max(1.0, s.x1);
    m.slope_at_x1 = std::abs(lower_prime(s, s.x1) - middle_prime(s, s.x1));
    return m;
}

}  // namespace esocp
