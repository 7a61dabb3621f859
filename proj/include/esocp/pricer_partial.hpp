#pragma once

#include "esocp/filter.hpp"
#include "esocp/lattice.hpp"
#include "esocp/model.hpp"

#include <optional>
#include <vector>

namespace esocp {

/// Outsider exercise boundary x*(k, y_l): smallest exercised node price per (step, belief layer).
class ExerciseSurface {
public:
    ExerciseSurface() = default;
    ExerciseSurface(int steps, int layers);

    int steps() const { return steps_; }
    int layers() const { return layers_; }
    double at(int k, int l) const { return data_[static_cast<std::size_t>(k) * layers_ + l]; }
    double& at(int k, int l) { return data_[static_cast<std::size_t>(k) * layers_ + l]; }

    /// Boundary at an off-grid belief, interpolated between adjacent layers.
    /// Infinite when either bracketing layer has no exercise.
    double at_belief(int k, const GridBracket& b) const;

private:
    int steps_ = 0;
    int layers_ = 0;
    std::vector<double> data_;
};

/// Retained value grids U_{k,j}^l laid out as values[j * L + l].
struct PartialInfoSlices {
    std::vector<int> steps;
    std::vector<std::vector<double>> values;

    const std::vector<double>* find(int k) const;
};

struct PartialInfoOptions {
    DriftConvention convention = DriftConvention::per_step;
    bool compute_surface = true;
    /// false prices the hold-to-maturity claim through the same grid recursion.
    bool allow_exercise = true;
    bool retain_all = false;
    std::vector<int> retain_steps;
};

struct PartialInfoResult {
    Lattice lattice;
    FilterGrid grid;
    std::vector<double> root_layers;  ///< U_{0,0}^l for every belief layer
    std::optional<ExerciseSurface> surface;
    PartialInfoSlices slices;

    /// Root value at prior y0, interpolated between belief layers.
    double root(double y0) const;
};

/// Grid-interpolation approximation of the belief-dependent backward recursion.
/// Throws std::invalid_argument for a grid of fewer than two points and AdmissibilityError
/// for inadmissible lattice probabilities.
PartialInfoResult price_partial(const Model& model, int steps, int grid_size, const PartialInfoOptions& options = {});
PartialInfoResult price_partial(const Model& model, const LatticeSetup& setup, int grid_size,
                                const PartialInfoOptions& options = {});

inline constexpr int kMaxExactSteps = 22;

/// Exact recursion over all 2^N price paths and their beliefs; no interpolation.
double price_partial_exact(const Model& model, int steps, double y0,
                           DriftConvention convention = DriftConvention::per_step);

/// Surface recomputed from fully retained slices.
ExerciseSurface extract_surface(const PartialInfoSlices& slices, const Lattice& lattice, const FilterGrid& grid,
                                double strike);

}  // namespace esocp
