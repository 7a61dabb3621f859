#include "esocp/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esocp {

namespace {

// Predictive mass of each regime for the next step given belief y.
double mass_regime0(double y, const QMatrix& q) { return q.q00 * (1.0 - y) + q.q10 * y; }
double mass_regime1(double y, const QMatrix& q) { return q.q01 * (1.0 - y) + q.q11 * y; }

}  // namespace

double predict_return_prob(double y, const QMatrix& q, const RegimeReturnProbs& p, Move move) {
    const double p0 = move == Move::up ? p.up0 : p.down0;
    const double p1 = move == Move::up ? p.up1 : p.down1;
    return p0 * mass_regime0(y, q) + p1 * mass_regime1(y, q);
}

double update_belief(double y, Move move, const QMatrix& q, const RegimeReturnProbs& p) {
    const double p0 = move == Move::up ? p.up0 : p.down0;
    const double p1 = move == Move::up ? p.up1 : p.down1;
    const double num = p1 * mass_regime1(y, q);
    const double den = p0 * mass_regime0(y, q) + num;
    if (!(den > 0.0)) throw std::domain_error("belief update with zero predictive probability");
    return std::clamp(num / den, 0.0, 1.0);
}

FilterGrid::FilterGrid(int size, const QMatrix& q, const RegimeReturnProbs& p) {
    if (size < 2) throw std::invalid_argument("belief grid needs at least two points");
    points_.resize(size);
    for (int l = 0; l < size; ++l) points_[l] = static_cast<double>(l) / static_cast<double>(size - 1);
    points_.back() = 1.0;

    up_prob_.resize(size);
    target_up_.resize(size);
    target_down_.resize(size);
    bracket_up_.resize(size);
    bracket_down_.resize(size);
    for (int l = 0; l < size; ++l) {
        const double y = points_[l];
        up_prob_[l] = predict_return_prob(y, q, p, Move::up);
        target_up_[l] = update_belief(y, Move::up, q, p);
        target_down_[l] = update_belief(y, Move::down, q, p);
        bracket_up_[l] = locate(target_up_[l]);
        bracket_down_[l] = locate(target_down_[l]);
    }
}

GridBracket FilterGrid::locate(double y) const {
    const int last = size() - 1;
    y = std::clamp(y, 0.0, 1.0);
    int i = std::clamp(static_cast<int>(std::floor(y * last)), 0, last);
    while (i > 0 && points_[i] > y) --i;
    while (i < last && points_[i + 1] <= y) ++i;
    if (points_[i] == y) return {i, i, 0.0};
    return {i, i + 1, (y - points_[i]) / (points_[i + 1] - points_[i])};
}

FilterGrid build_grid(int size, const QMatrix& q, const RegimeReturnProbs& p) {
    return FilterGrid(size, q, p);
}

std::vector<double> simulate_continuous_filter(const Model& model, double y_start, std::span<const double> dw,
                                               double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const double lambda = model.params.lambda;
    const double eta = model.derived.eta;
    std::vector<double> path(dw.size() + 1);
    double y = std::clamp(y_start, 0.0, 1.0);
    path[0] = y;
    for (std::size_t i = 0; i < dw.size(); ++i) {
        y += lambda * (1.0 - y) * dt - eta * y * (1.0 - y) * dw[i];
        y = std::clamp(y, 0.0, 1.0);
        path[i + 1] = y;
    }
    return path;
}

namespace {

double initial_ratio(double y_start) {
    if (!(y_start >= 0.0 && y_start < 1.0)) {
        throw std::invalid_argument("likelihood ratio needs an initial belief in [0,1)");
    }
    return y_start / (1.0 - y_start);
}

}  // namespace

LikelihoodRatioPath likelihood_ratio_quadrature(const Model& model, double y_start, std::span<const double> dw_star,
                                                double dt) {
    const double phi0 = initial_ratio(y_start);
    const double lambda = model.params.lambda;
    const double eta = model.derived.eta;

    LikelihoodRatioPath out{dt, std::vector<double>(dw_star.size() + 1)};
    out.phi[0] = phi0;
    double w = 0.0;
    double integral = 0.0;
    double prev_integrand = 1.0;  // e^{0} / Lambda_0
    for (std::size_t i = 1; i <= dw_star.size(); ++i) {
        w += dw_star[i - 1];
        const double t = out.time(i);
        const double log_lambda = -eta * w - 0.5 * eta * eta * t;
        const double integrand = std::exp(-lambda * t - log_lambda);
        integral += 0.5 * (prev_integrand + integrand) * dt;
        prev_integrand = integrand;
        out.phi[i] = std::exp(lambda * t + log_lambda) * (phi0 + lambda * integral);
    }
    return out;
}

LikelihoodRatioPath likelihood_ratio_from_prices(const Model& model, double y_start, std::span<const double> prices,
                                                 double dt) {
    const double phi0 = initial_ratio(y_start);
    if (prices.empty()) throw std::invalid_argument("empty price path");
    const double lambda = model.params.lambda;
    const double kappa = model.derived.kappa;
    const double power = -model.derived.eta / model.params.sigma;
    const double x0 = prices[0];

    // Phi_t = e^{kappa t} (X_t/x)^{power} (phi + lambda int e^{-kappa s} (X_s/x)^{-power} ds)
    LikelihoodRatioPath out{dt, std::vector<double>(prices.size())};
    out.phi[0] = phi0;
    double integral = 0.0;
    double prev = 1.0;
    for (std::size_t i = 1; i < prices.size(); ++i) {
        const double t = out.time(i);
        const double rel = prices[i] / x0;
        const double integrand = std::exp(-kappa * t) * std::pow(rel, -power);
        integral += 0.5 * (prev + integrand) * dt;
        prev = integrand;
        out.phi[i] = std::exp(kappa * t) * std::pow(rel, power) * (phi0 + lambda * integral);
    }
    return out;
}

LikelihoodRatioPath likelihood_ratio_reference(const Model& model, double y_start, std::span<const double> dw_star,
                                               double dt, SdeScheme scheme) {
    const double phi0 = initial_ratio(y_start);
    const double lambda = model.params.lambda;
    const double eta = model.derived.eta;
    LikelihoodRatioPath out{dt, std::vector<double>(dw_star.size() + 1)};
    double phi = phi0;
    out.phi[0] = phi;
    for (std::size_t i = 0; i < dw_star.size(); ++i) {
        const double dw = dw_star[i];
        double next = phi + lambda * (1.0 + phi) * dt - eta * phi * dw;
        if (scheme == SdeScheme::milstein) next += 0.5 * eta * eta * phi * (dw * dw - dt);
        phi = next;
        out.phi[i + 1] = phi;
    }
    return out;
}

}  // namespace esocp
