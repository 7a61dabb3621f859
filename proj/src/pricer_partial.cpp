#include "esocp/pricer_partial.hpp"

#include "esocp/pricer_full.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace esocp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ExerciseSurface::ExerciseSurface(int steps, int layers)
    : steps_(steps), layers_(layers), data_(static_cast<std::size_t>(steps + 1) * layers, kInf) {}

double ExerciseSurface::at_belief(int k, const GridBracket& b) const {
    const double a = at(k, b.lo);
    if (b.weight == 0.0) return a;
    const double c = at(k, b.hi);
    if (std::isinf(a) || std::isinf(c)) return kInf;
    return a + (c - a) * b.weight;
}

const std::vector<double>* PartialInfoSlices::find(int k) const {
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i] == k) return &values[i];
    }
    return nullptr;
}

double PartialInfoResult::root(double y0) const {
    return interpolate(root_layers, grid.locate(y0));
}

PartialInfoResult price_partial(const Model& model, const LatticeSetup& s, int grid_size,
                                const PartialInfoOptions& options) {
    const int n = s.lattice.steps;
    const double strike = model.params.strike;
    PartialInfoResult out{s.lattice, build_grid(grid_size, s.q, s.p), {}, std::nullopt, {}};
    const FilterGrid& grid = out.grid;
    const int layers = grid.size();

    std::vector<double> up_prob(layers);
    std::vector<double> down_prob(layers);
    std::vector<GridBracket> up_br(layers);
    std::vector<GridBracket> down_br(layers);
    for (int l = 0; l < layers; ++l) {
        up_prob[l] = grid.up_probability(l);
        down_prob[l] = grid.down_probability(l);
        up_br[l] = grid.bracket(l, Move::up);
        down_br[l] = grid.bracket(l, Move::down);
    }

    if (options.compute_surface) {
        out.surface.emplace(n, layers);
        for (int l = 0; l < layers; ++l) out.surface->at(n, l) = strike;
    }
    auto retained = [&](int k) {
        return options.retain_all ||
               std::find(options.retain_steps.begin(), options.retain_steps.end(), k) != options.retain_steps.end();
    };

    // values[j * L + l]; row j of step k+1 is overwritten by row j of step k once read.
    std::vector<double> values(static_cast<std::size_t>(n + 1) * layers);
    for (int j = 0; j <= n; ++j) {
        const double payoff = std::max(s.lattice.price(n, j) - strike, 0.0);
        std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(j) * layers, layers, payoff);
    }
    if (retained(n)) {
        out.slices.steps.push_back(n);
        out.slices.values.push_back(values);
    }

    std::vector<double> row(layers);
    std::vector<int> first_exercise(layers);
    for (int k = n - 1; k >= 0; --k) {
        std::fill(first_exercise.begin(), first_exercise.end(), -1);
        for (int j = 0; j <= k; ++j) {
            const double price = s.lattice.price(k, j);
            const double intrinsic = options.allow_exercise ? std::max(price - strike, 0.0) : 0.0;
            const std::span<const double> after_up(values.data() + static_cast<std::size_t>(j + 1) * layers, layers);
            const std::span<const double> after_down(values.data() + static_cast<std::size_t>(j) * layers, layers);
            for (int l = 0; l < layers; ++l) {
                const double cont = s.discount * (up_prob[l] * interpolate(after_up, up_br[l]) +
                                                  down_prob[l] * interpolate(after_down, down_br[l]));
                if (options.allow_exercise) {
                    if (first_exercise[l] < 0 && exercise_optimal(intrinsic, cont)) first_exercise[l] = j;
                    row[l] = std::max(intrinsic, cont);
                } else {
                    row[l] = cont;
                }
            }
            std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(j) * layers);
        }
        if (out.surface) {
            for (int l = 0; l < layers; ++l) {
                if (first_exercise[l] >= 0) out.surface->at(k, l) = s.lattice.price(k, first_exercise[l]);
            }
        }
        if (retained(k)) {
            out.slices.steps.push_back(k);
            out.slices.values.emplace_back(values.begin(),
                                           values.begin() + static_cast<std::ptrdiff_t>(k + 1) * layers);
        }
    }
    out.root_layers.assign(values.begin(), values.begin() + layers);
    return out;
}

PartialInfoResult price_partial(const Model& model, int steps, int grid_size, const PartialInfoOptions& options) {
    return price_partial(model, make_setup(model, steps, options.convention), grid_size, options);
}

namespace {

struct ExactTree {
    const LatticeSetup& s;
    double strike;

    double value(int k, int j, double y) const {
        const double intrinsic = std::max(s.lattice.price(k, j) - strike, 0.0);
        if (k == s.lattice.steps) return intrinsic;
        const double p_up = predict_return_prob(y, s.q, s.p, Move::up);
        const double p_down = predict_return_prob(y, s.q, s.p, Move::down);
        const double cont = s.discount * (p_up * value(k + 1, j + 1, update_belief(y, Move::up, s.q, s.p)) +
                                          p_down * value(k + 1, j, update_belief(y, Move::down, s.q, s.p)));
        return std::max(intrinsic, cont);
    }
};

}  // namespace

double price_partial_exact(const Model& model, int steps, double y0, DriftConvention convention) {
    if (steps > kMaxExactSteps) {
        throw std::invalid_argument("exact belief-tree pricing is limited to " + std::to_string(kMaxExactSteps) +
                                    " steps");
    }
    if (!(y0 >= 0.0 && y0 <= 1.0)) throw std::invalid_argument("prior outside [0,1]");
    const LatticeSetup s = make_setup(model, steps, convention);
    return ExactTree{s, model.params.strike}.value(0, 0, y0);
}

ExerciseSurface extract_surface(const PartialInfoSlices& slices, const Lattice& lattice, const FilterGrid& grid,
                                double strike) {
    const int n = lattice.steps;
    const int layers = grid.size();
    ExerciseSurface surface(n, layers);
    for (int l = 0; l < layers; ++l) surface.at(n, l) = strike;
    for (int k = 0; k < n; ++k) {
        const std::vector<double>* values = slices.find(k);
        if (values == nullptr) throw std::invalid_argument("surface extraction needs the slice of every step");
        for (int l = 0; l < layers; ++l) {
            for (int j = 0; j <= k; ++j) {
                const double intrinsic = std::max(lattice.price(k, j) - strike, 0.0);
                if (exercise_optimal(intrinsic, (*values)[static_cast<std::size_t>(j) * layers + l])) {
                    surface.at(k, l) = lattice.price(k, j);
                    break;
                }
            }
        }
    }
    return surface;
}

}  // namespace esocp
