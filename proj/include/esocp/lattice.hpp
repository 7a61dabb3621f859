#pragma once

#include "esocp/model.hpp"

#include <array>
#include <stdexcept>

namespace esocp {

/// Recombining Cox-Ross-Rubinstein stock lattice.
struct Lattice {
    int steps = 0;       ///< N
    double dt = 0.0;     ///< h = T / N
    double up = 1.0;     ///< e^{sigma sqrt(h)}
    double down = 1.0;   ///< 1 / up
    double spot = 0.0;

    /// Price at step k after j up-moves (0 <= j <= k <= N): spot * up^{2j - k}.
    double price(int k, int j) const;
    double time(int k) const { return k * dt; }
};

Lattice build_lattice(const ModelParams& params, int steps);

/// One-step regime transition probabilities. Row 1 is (0, 1): the post-switch state absorbs.
struct QMatrix {
    double q00 = 1.0;
    double q01 = 0.0;
    double q10 = 0.0;
    double q11 = 1.0;
};

QMatrix transition_matrix(double lambda, double dt);

/// Exponent used when matching the one-step expected return.
enum class DriftConvention {
    per_step,       ///< e^{mu h}: one-step mean return matches the continuous drift
    literal_sqrt_h  ///< e^{mu sqrt(h)} as printed in the original lattice formula
};

/// Up/down probabilities conditional on the regime prevailing at the end of the step.
struct RegimeReturnProbs {
    double up0 = 0.5;
    double down0 = 0.5;
    double up1 = 0.5;
    double down1 = 0.5;

    double up(Regime regime) const { return regime == Regime::pre_switch ? up0 : up1; }
    double down(Regime regime) const { return regime == Regime::pre_switch ? down0 : down1; }
};

class AdmissibilityError : public std::domain_error {
public:
    AdmissibilityError(const std::string& what, Regime regime, double max_dt)
        : std::domain_error(what), regime_(regime), max_dt_(max_dt) {}
    Regime regime() const { return regime_; }
    /// Largest step length for which the offending regime's probabilities are admissible.
    double max_admissible_dt() const { return max_dt_; }

private:
    Regime regime_;
    double max_dt_;
};

/// Throws AdmissibilityError unless every probability lies strictly inside (0, 1).
RegimeReturnProbs regime_return_probs(const ModelParams& params, const Lattice& lattice,
                                      DriftConvention convention = DriftConvention::per_step);

enum class Move : int { down = 0, up = 1 };

struct JointTransition {
    Move move;
    Regime next_regime;
    double probability;
};

/// The four (move, next regime) branches out of `from` with masses p * q.
std::array<JointTransition, 4> joint_full_info_transitions(const QMatrix& q, const RegimeReturnProbs& p,
                                                           Regime from);

/// Everything the lattice engines share for one discretization.
struct LatticeSetup {
    Lattice lattice;
    QMatrix q;
    RegimeReturnProbs p;
    double discount = 1.0;  ///< e^{-r h}
};

LatticeSetup make_setup(const Model& model, int steps, DriftConvention convention = DriftConvention::per_step);

}  // namespace esocp
