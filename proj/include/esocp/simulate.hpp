#pragma once

#include "esocp/lattice.hpp"
#include "esocp/model.hpp"
#include "esocp/pricer_full.hpp"
#include "esocp/pricer_partial.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esocp {

inline constexpr std::string_view kRngName = "mt19937_64/seed_seq(master_seed,path_index)";

/// Independent per-path stream derived from (master seed, path index).
class PathRng {
public:
    PathRng(std::uint64_t master_seed, std::uint64_t path_index);

    /// Uniform on [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// One simulated path of (X, Y) on the lattice plus the outsiders' filtered beliefs.
struct SimPath {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
    std::vector<Regime> regime;   ///< Y_k, k = 0..N
    std::vector<Move> moves;      ///< move from step k to k+1, k = 0..N-1
    std::vector<int> up_moves;    ///< lattice index j at step k
    std::vector<double> stock;    ///< X_k
    std::vector<double> priors;   ///< outsider priors y0, one per variant
    std::vector<std::vector<double>> outsider_belief;  ///< [variant][k]
    std::optional<int> switch_step;  ///< first k with Y_k = 1

    int steps() const { return static_cast<int>(moves.size()); }
    double insider_belief(int k) const { return regime[k] == Regime::post_switch ? 1.0 : 0.0; }
};

/// Y_0 ~ Bernoulli(params.y0); each step draws the next regime from q, then the move from the
/// probabilities of the regime prevailing at the end of the step.
SimPath simulate_joint_path(const Model& model, const LatticeSetup& setup, std::uint64_t master_seed,
                            std::uint64_t path_index, std::span<const double> outsider_priors);

enum class AgentKind { insider, outsider };

struct ExerciseOutcome {
    AgentKind agent = AgentKind::insider;
    double prior = 0.0;                ///< outsider prior; unused for the insider
    std::optional<int> exercise_step;
    double exercise_price = 0.0;
    double discounted_payoff = 0.0;

    std::string label() const;
};

/// Replays the insider's regime boundaries and each outsider's belief-interpolated surface.
/// Returns the insider first, then one outcome per outsider prior on the path.
/// Throws std::invalid_argument when the pricing lattices do not match the path.
std::vector<ExerciseOutcome> replay_policies(const SimPath& path, const FullInfoResult& full,
                                             const PartialInfoResult& partial, double strike, double rate);

struct AgentSummary {
    std::string label;
    std::size_t paths = 0;
    double mean_payoff = 0.0;
    double stdev_payoff = 0.0;
    double std_error = 0.0;
    double exercise_frequency = 0.0;
    double mean_exercise_time = 0.0;  ///< years, over exercised paths; NaN if none
};

struct HeadToHead {
    std::string label;  ///< "insider-vs-<outsider label>"
    double mean_difference = 0.0;  ///< insider minus outsider, common random numbers
    double std_error = 0.0;
};

struct SimulationSummary {
    std::vector<AgentSummary> agents;
    std::vector<HeadToHead> head_to_head;
};

/// outcomes[path][agent], every path with the same agent layout.
SimulationSummary aggregate_stats(const std::vector<std::vector<ExerciseOutcome>>& outcomes, double dt);

/// Simulates `paths` paths with substreams 0..paths-1 and replays every policy on each.
std::vector<std::vector<ExerciseOutcome>> run_monte_carlo(const Model& model, const LatticeSetup& setup,
                                                          const FullInfoResult& full,
                                                          const PartialInfoResult& partial,
                                                          std::span<const double> outsider_priors,
                                                          std::size_t paths, std::uint64_t master_seed);

}  // namespace esocp
