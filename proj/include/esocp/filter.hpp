#pragma once

#include "esocp/lattice.hpp"
#include "esocp/model.hpp"

#include <span>
#include <vector>

namespace esocp {

/// Probability of the next move given the current filtered belief y = P(regime 1 | prices).
double predict_return_prob(double belief, const QMatrix& q, const RegimeReturnProbs& p, Move move);

/// Bayes update of the belief after observing `move`. Throws std::domain_error on a zero denominator.
double update_belief(double belief, Move move, const QMatrix& q, const RegimeReturnProbs& p);

/// Position of a belief between two grid points. `lo == hi` (weight 0) on exact hits.
struct GridBracket {
    int lo = 0;
    int hi = 0;
    double weight = 0.0;  ///< fraction of the way from point lo to point hi
};

/// Equidistant belief grid 0 = y_0 < ... < y_{L-1} = 1 with the one-step
/// posterior targets and their brackets precomputed for both moves.
class FilterGrid {
public:
    FilterGrid(int size, const QMatrix& q, const RegimeReturnProbs& p);

    int size() const { return static_cast<int>(points_.size()); }
    double spacing() const { return 1.0 / (size() - 1); }
    std::span<const double> points() const { return points_; }
    double point(int l) const { return points_[l]; }

    double up_probability(int l) const { return up_prob_[l]; }
    double down_probability(int l) const { return 1.0 - up_prob_[l]; }
    double target(int l, Move move) const { return move == Move::up ? target_up_[l] : target_down_[l]; }
    const GridBracket& bracket(int l, Move move) const {
        return move == Move::up ? bracket_up_[l] : bracket_down_[l];
    }

    /// Bracket of an arbitrary belief in [0, 1].
    GridBracket locate(double belief) const;

private:
    std::vector<double> points_;
    std::vector<double> up_prob_;
    std::vector<double> target_up_;
    std::vector<double> target_down_;
    std::vector<GridBracket> bracket_up_;
    std::vector<GridBracket> bracket_down_;
};

/// Throws std::invalid_argument for L < 2.
FilterGrid build_grid(int size, const QMatrix& q, const RegimeReturnProbs& p);

/// Linear interpolation across belief layers, clamped to the range of the two bracket values.
inline double interpolate(std::span<const double> layer_values, const GridBracket& b) {
    const double a = layer_values[b.lo];
    if (b.weight == 0.0) return a;
    const double c = layer_values[b.hi];
    const double v = a + (c - a) * b.weight;
    const double lo = a < c ? a : c;
    const double hi = a < c ? c : a;
    return v < lo ? lo : (v > hi ? hi : v);
}

/// Euler-Maruyama path of dY = lambda (1 - Y) dt - eta Y (1 - Y) dW driven by
/// innovation increments `dw`, clamped to [0, 1] after every step. Size dw.size() + 1.
std::vector<double> simulate_continuous_filter(const Model& model, double y_start, std::span<const double> dw,
                                               double dt);

/// Likelihood ratio Phi = Y / (1 - Y) sampled on t_i = i * dt.
struct LikelihoodRatioPath {
    double dt = 0.0;
    std::vector<double> phi;

    double time(std::size_t i) const { return static_cast<double>(i) * dt; }
};

/// Pathwise representation Phi_t = e^{lambda t} Lambda_t (phi + lambda int_0^t e^{-lambda s} / Lambda_s ds)
/// with Lambda = E(-eta W*) evaluated exactly and the integral by the trapezoidal rule.
/// Throws std::invalid_argument when y_start >= 1.
LikelihoodRatioPath likelihood_ratio_quadrature(const Model& model, double y_start, std::span<const double> dw_star,
                                                double dt);

/// The same quantity written through the stock path X (sampled on the same grid, X[0] the spot):
/// Phi_t = phi e^{kappa t} (X_t/x)^{-eta/sigma} + lambda int_0^t e^{kappa (t-s)} (X_t/X_s)^{-eta/sigma} ds.
LikelihoodRatioPath likelihood_ratio_from_prices(const Model& model, double y_start, std::span<const double> prices,
                                                 double dt);

enum class SdeScheme { euler, milstein };

/// Time-stepping reference for dPhi = lambda (1 + Phi) dt - eta Phi dW*.
LikelihoodRatioPath likelihood_ratio_reference(const Model& model, double y_start, std::span<const double> dw_star,
                                               double dt, SdeScheme scheme = SdeScheme::milstein);

}  // namespace esocp
