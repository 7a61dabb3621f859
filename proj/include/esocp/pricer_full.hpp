#pragma once

#include "esocp/lattice.hpp"
#include "esocp/model.hpp"

#include <optional>
#include <vector>

namespace esocp {

/// Exercise test shared by every lattice engine: a node with positive intrinsic value
/// is exercised when intrinsic >= continuation - 1e-12 * max(1, intrinsic).
inline bool exercise_optimal(double intrinsic, double continuation) {
    const double tol = 1e-12 * (intrinsic > 1.0 ? intrinsic : 1.0);
    return intrinsic > 0.0 && intrinsic >= continuation - tol;
}

/// Exercise boundary indexed by step k = 0..N; +inf where no node exercises.
using Boundary = std::vector<double>;

/// Value slices for both regimes: slices[k][j], j = 0..k.
struct FullInfoSlices {
    std::vector<std::vector<double>> regime0;
    std::vector<std::vector<double>> regime1;

    const std::vector<std::vector<double>>& of(Regime regime) const {
        return regime == Regime::pre_switch ? regime0 : regime1;
    }
};

struct FullInfoResult {
    Lattice lattice;
    double v0_root = 0.0;
    double v1_root = 0.0;
    Boundary boundary0;
    Boundary boundary1;
    std::optional<FullInfoSlices> slices;

    double root(Regime regime) const { return regime == Regime::pre_switch ? v0_root : v1_root; }
    const Boundary& boundary(Regime regime) const {
        return regime == Regime::pre_switch ? boundary0 : boundary1;
    }
};

struct FullInfoOptions {
    DriftConvention convention = DriftConvention::per_step;
    bool retain_slices = false;
};

/// Joint backward recursion over the two regime trees.
FullInfoResult price_full(const Model& model, int steps, const FullInfoOptions& options = {});
FullInfoResult price_full(const Model& model, const LatticeSetup& setup, bool retain_slices = false);

/// Smallest node price exercised at each step, recomputed from retained value slices.
Boundary extract_boundary(const FullInfoSlices& slices, Regime regime, const Lattice& lattice, double strike);

/// European (hold-to-maturity) values on the same two-regime lattice.
struct EuropeanValues {
    double regime0 = 0.0;
    double regime1 = 0.0;

    /// Value for an agent whose prior on regime 1 is `belief`; the payoff is linear in the prior.
    double at_belief(double belief) const { return (1.0 - belief) * regime0 + belief * regime1; }
};

EuropeanValues price_european_reference(const Model& model, const LatticeSetup& setup);
EuropeanValues price_european_reference(const Model& model, int steps,
                                        DriftConvention convention = DriftConvention::per_step);

}  // namespace esocp
