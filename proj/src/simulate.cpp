#include "esocp/simulate.hpp"

#include "esocp/filter.hpp"
#include "esocp/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace esocp {

PathRng::PathRng(std::uint64_t master_seed, std::uint64_t path_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32)};
    engine_.seed(seq);
}

SimPath simulate_joint_path(const Model& model, const LatticeSetup& s, std::uint64_t master_seed,
                            std::uint64_t path_index, std::span<const double> outsider_priors) {
    const int n = s.lattice.steps;
    PathRng rng(master_seed, path_index);
    SimPath path;
    path.master_seed = master_seed;
    path.path_index = path_index;
    path.regime.resize(n + 1);
    path.moves.resize(n);
    path.up_moves.resize(n + 1);
    path.stock.resize(n + 1);
    path.priors.assign(outsider_priors.begin(), outsider_priors.end());
    path.outsider_belief.assign(outsider_priors.size(), std::vector<double>(n + 1));

    Regime regime = rng.uniform() < model.params.y0 ? Regime::post_switch : Regime::pre_switch;
    int j = 0;
    path.regime[0] = regime;
    path.up_moves[0] = 0;
    path.stock[0] = s.lattice.price(0, 0);
    for (std::size_t v = 0; v < outsider_priors.size(); ++v) path.outsider_belief[v][0] = outsider_priors[v];
    if (regime == Regime::post_switch) path.switch_step = 0;

    for (int k = 0; k < n; ++k) {
        const double stay = regime == Regime::pre_switch ? s.q.q00 : s.q.q10;
        if (rng.uniform() >= stay) regime = Regime::post_switch;
        const Move move = rng.uniform() < s.p.up(regime) ? Move::up : Move::down;
        if (move == Move::up) ++j;
        path.moves[k] = move;
        path.regime[k + 1] = regime;
        path.up_moves[k + 1] = j;
        path.stock[k + 1] = s.lattice.price(k + 1, j);
        if (regime == Regime::post_switch && !path.switch_step) path.switch_step = k + 1;
        for (std::size_t v = 0; v < outsider_priors.size(); ++v) {
            path.outsider_belief[v][k + 1] = update_belief(path.outsider_belief[v][k], move, s.q, s.p);
        }
    }
    return path;
}

std::string ExerciseOutcome::label() const {
    if (agent == AgentKind::insider) return "insider";
    return "outsider(y0=" + format_double(prior) + ")";
}

namespace {

bool same_lattice(const Lattice& a, const Lattice& b) {
    return a.steps == b.steps && a.dt == b.dt && a.up == b.up && a.spot == b.spot;
}

ExerciseOutcome settle(ExerciseOutcome out, const SimPath& path, int k, const Lattice& lat, double strike,
                       double rate) {
    out.exercise_step = k;
    out.exercise_price = path.stock[k];
    out.discounted_payoff = std::exp(-rate * lat.time(k)) * std::max(path.stock[k] - strike, 0.0);
    return out;
}

}  // namespace

std::vector<ExerciseOutcome> replay_policies(const SimPath& path, const FullInfoResult& full,
                                             const PartialInfoResult& partial, double strike, double rate) {
    const int n = path.steps();
    if (full.lattice.steps != n || partial.lattice.steps != n || !same_lattice(full.lattice, partial.lattice)) {
        throw std::invalid_argument("pricing lattices do not match the simulated path");
    }
    if (!partial.surface) throw std::invalid_argument("partial-information result has no exercise surface");
    const Lattice& lat = full.lattice;
    const ExerciseSurface& surface = *partial.surface;

    std::vector<ExerciseOutcome> outcomes;
    outcomes.reserve(1 + path.priors.size());

    ExerciseOutcome insider;
    insider.agent = AgentKind::insider;
    for (int k = 0; k <= n; ++k) {
        if (path.stock[k] >= full.boundary(path.regime[k])[k]) {
            insider = settle(insider, path, k, lat, strike, rate);
            break;
        }
    }
    outcomes.push_back(insider);

    for (std::size_t v = 0; v < path.priors.size(); ++v) {
        ExerciseOutcome outsider;
        outsider.agent = AgentKind::outsider;
        outsider.prior = path.priors[v];
        for (int k = 0; k <= n; ++k) {
            const double threshold = surface.at_belief(k, partial.grid.locate(path.outsider_belief[v][k]));
            if (path.stock[k] >= threshold) {
                outsider = settle(outsider, path, k, lat, strike, rate);
                break;
            }
        }
        outcomes.push_back(outsider);
    }
    return outcomes;
}

SimulationSummary aggregate_stats(const std::vector<std::vector<ExerciseOutcome>>& outcomes, double dt) {
    SimulationSummary summary;
    if (outcomes.empty()) return summary;
    const std::size_t agents = outcomes.front().size();
    const double m = static_cast<double>(outcomes.size());

    for (std::size_t a = 0; a < agents; ++a) {
        AgentSummary s;
        s.label = outcomes.front()[a].label();
        s.paths = outcomes.size();
        double sum = 0.0;
        double exercised = 0.0;
        double time_sum = 0.0;
        for (const auto& row : outcomes) {
            sum += row[a].discounted_payoff;
            if (row[a].exercise_step) {
                exercised += 1.0;
                time_sum += *row[a].exercise_step * dt;
            }
        }
        s.mean_payoff = sum / m;
        double ss = 0.0;
        for (const auto& row : outcomes) {
            const double d = row[a].discounted_payoff - s.mean_payoff;
            ss += d * d;
        }
        s.stdev_payoff = outcomes.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
        s.std_error = s.stdev_payoff / std::sqrt(m);
        s.exercise_frequency = exercised / m;
        s.mean_exercise_time = exercised > 0.0 ? time_sum / exercised : std::numeric_limits<double>::quiet_NaN();
        summary.agents.push_back(s);
    }

    for (std::size_t a = 1; a < agents; ++a) {
        HeadToHead h;
        h.label = "insider-vs-" + outcomes.front()[a].label();
        double sum = 0.0;
        for (const auto& row : outcomes) sum += row[0].discounted_payoff - row[a].discounted_payoff;
        h.mean_difference = sum / m;
        double ss = 0.0;
        for (const auto& row : outcomes) {
            const double d = row[0].discounted_payoff - row[a].discounted_payoff - h.mean_difference;
            ss += d * d;
        }
        h.std_error = outcomes.size() > 1 ? std::sqrt(ss / (m - 1.0)) / std::sqrt(m) : 0.0;
        summary.head_to_head.push_back(h);
    }
    return summary;
}

std::vector<std::vector<ExerciseOutcome>> run_monte_carlo(const Model& model, const LatticeSetup& setup,
                                                          const FullInfoResult& full,
                                                          const PartialInfoResult& partial,
                                                          std::span<const double> outsider_priors,
                                                          std::size_t paths, std::uint64_t master_seed) {
    std::vector<std::vector<ExerciseOutcome>> outcomes;
    outcomes.reserve(paths);
    for (std::size_t i = 0; i < paths; ++i) {
        const SimPath path = simulate_joint_path(model, setup, master_seed, i, outsider_priors);
        outcomes.push_back(replay_policies(path, full, partial, model.params.strike, model.params.r));
    }
    return outcomes;
}

}  // namespace esocp
