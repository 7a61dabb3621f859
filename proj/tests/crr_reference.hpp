#pragma once

// Plain single-regime CRR call pricer used as an independent oracle in tests.

#include <algorithm>
#include <cmath>
#include <vector>

namespace crr_reference {

inline double call(double spot, double strike, double rate, double drift, double sigma, double maturity, int steps,
                   bool american) {
    const double h = maturity / steps;
    const double u = std::exp(sigma * std::sqrt(h));
    const double d = 1.0 / u;
    const double p = (std::exp(drift * h) - d) / (u - d);
    const double disc = std::exp(-rate * h);
    std::vector<double> v(steps + 1);
    for (int j = 0; j <= steps; ++j) v[j] = std::max(spot * std::pow(u, 2 * j - steps) - strike, 0.0);
    for (int k = steps - 1; k >= 0; --k) {
        for (int j = 0; j <= k; ++j) {
            const double cont = disc * (p * v[j + 1] + (1.0 - p) * v[j]);
            v[j] = american ? std::max(cont, spot * std::pow(u, 2 * j - k) - strike) : cont;
        }
    }
    return v[0];
}

}  // namespace crr_reference
