#include "smoothing.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esocp::cli {

std::vector<double> smooth_polynomial(const std::vector<double>& times, const std::vector<double>& values,
                                      int degree) {
    if (times.size() != values.size()) throw std::invalid_argument("smoothing: size mismatch");
    if (degree < 0) throw std::invalid_argument("smoothing: negative degree");

    std::vector<std::size_t> finite;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isfinite(values[i])) finite.push_back(i);
    }
    std::vector<double> out(values);
    if (finite.empty()) return out;

    const double t_lo = times[finite.front()];
    const double t_hi = times[finite.back()];
    const double half = t_hi > t_lo ? 0.5 * (t_hi - t_lo) : 1.0;
    const double mid = 0.5 * (t_lo + t_hi);
    auto scaled = [&](double t) { return (t - mid) / half; };

    const int cols = std::min<int>(degree + 1, static_cast<int>(finite.size()));
    Eigen::MatrixXd design(finite.size(), cols);
    Eigen::VectorXd rhs(finite.size());
    for (std::size_t r = 0; r < finite.size(); ++r) {
        const double s = scaled(times[finite[r]]);
        double power = 1.0;
        for (int c = 0; c < cols; ++c) {
            design(r, c) = power;
            power *= s;
        }
        rhs(r) = values[finite[r]];
    }
    const Eigen::VectorXd coef = design.householderQr().solve(rhs);
    for (std::size_t i : finite) {
        const double s = scaled(times[i]);
        double v = 0.0;
        for (int c = cols - 1; c >= 0; --c) v = v * s + coef(c);
        out[i] = v;
    }
    return out;
}

}  // namespace esocp::cli
