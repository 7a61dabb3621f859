#include "esocp/lattice.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace esocp {

double Lattice::price(int k, int j) const {
    return spot * std::pow(up, 2 * j - k);
}

Lattice build_lattice(const ModelParams& params, int steps) {
    if (steps < 1) throw std::invalid_argument("lattice needs at least one step");
    Lattice lat;
    lat.steps = steps;
    lat.dt = params.maturity / steps;
    lat.up = std::exp(params.sigma * std::sqrt(lat.dt));
    lat.down = 1.0 / lat.up;
    lat.spot = params.spot;
    return lat;
}

QMatrix transition_matrix(double lambda, double dt) {
    QMatrix q;
    q.q00 = std::exp(-lambda * dt);
    q.q01 = 1.0 - q.q00;
    q.q10 = 0.0;
    q.q11 = 1.0;
    return q;
}

namespace {

double up_probability(double mu, double sigma, const Lattice& lat, DriftConvention convention, Regime regime) {
    const double exponent = convention == DriftConvention::per_step ? mu * lat.dt : mu * std::sqrt(lat.dt);
    const double p = (std::exp(exponent) - lat.down) / (lat.up - lat.down);
    if (!(p > 0.0 && p < 1.0)) {
        double max_dt = 0.0;
        if (convention == DriftConvention::per_step) {
            max_dt = mu == 0.0 ? std::numeric_limits<double>::infinity() : (sigma * sigma) / (mu * mu);
        } else if (std::abs(mu) < sigma) {
            max_dt = std::numeric_limits<double>::infinity();
        }
        std::ostringstream msg;
        msg << "lattice probability out of range in regime " << index(regime) << " (p_up = " << p
            << "); largest admissible step length h is " << max_dt << " years";
        throw AdmissibilityError(msg.str(), regime, max_dt);
    }
    return p;
}

}  // namespace

RegimeReturnProbs regime_return_probs(const ModelParams& params, const Lattice& lattice,
                                      DriftConvention convention) {
    RegimeReturnProbs p;
    p.up0 = up_probability(params.mu0, params.sigma, lattice, convention, Regime::pre_switch);
    p.down0 = 1.0 - p.up0;
    p.up1 = up_probability(params.mu1, params.sigma, lattice, convention, Regime::post_switch);
    p.down1 = 1.0 - p.up1;
    return p;
}

std::array<JointTransition, 4> joint_full_info_transitions(const QMatrix& q, const RegimeReturnProbs& p,
                                                           Regime from) {
    const double to0 = from == Regime::pre_switch ? q.q00 : q.q10;
    const double to1 = from == Regime::pre_switch ? q.q01 : q.q11;
    return {{
        {Move::up, Regime::pre_switch, p.up0 * to0},
        {Move::down, Regime::pre_switch, p.down0 * to0},
        {Move::up, Regime::post_switch, p.up1 * to1},
        {Move::down, Regime::post_switch, p.down1 * to1},
    }};
}

LatticeSetup make_setup(const Model& model, int steps, DriftConvention convention) {
    LatticeSetup s;
    s.lattice = build_lattice(model.params, steps);
    s.q = transition_matrix(model.params.lambda, s.lattice.dt);
    s.p = regime_return_probs(model.params, s.lattice, convention);
    s.discount = std::exp(-model.params.r * s.lattice.dt);
    return s;
}

}  // namespace esocp
