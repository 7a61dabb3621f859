#pragma once

#include <vector>

namespace esocp::cli {

/// Least-squares polynomial in time through the finite points of `values`.
/// Infinite entries stay infinite; with fewer finite points than coefficients the
/// degree is reduced.
std::vector<double> smooth_polynomial(const std::vector<double>& times, const std::vector<double>& values,
                                      int degree);

}  // namespace esocp::cli
