#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "rulefx/metrics.hpp"
#include "rulefx/rng.hpp"
#include "rulefx/rules.hpp"

namespace rulefx {

// One weight per rule column.
using Chromosome = Eigen::VectorXd;

enum class FitnessKind { MeanReturn, Ssr };

const char* to_string(FitnessKind kind);

struct GAConfig {
    Eigen::Index population_size = 10;
    Eigen::Index parents_mating = 4;
    Eigen::Index generations = 200;
    double mutation_prob = 0.5;
    double crossover_prob = 0.4;
    double mutation_step = 0.2;  // stddev of the additive Gaussian nudge
    std::uint64_t seed = 0;
    FitnessKind fitness = FitnessKind::Ssr;

    void validate() const;  // ConfigError on out-of-range values
};

// ---------------------------------------------------------------------------
// Grid search over one rule's parameter grid, scored by the SSR of trading
// the raw signal as the position.
// ---------------------------------------------------------------------------

struct GridPoint {
    RuleParams params;
    double score = 0;
};

struct GridResult {
    std::string rule_id;
    RuleParams best_params;
    double best_score = 0;
    std::vector<GridPoint> evaluated;  // every valid grid point, enumeration order
};

// Enumerates the cartesian product of rule.grid (first axis slowest), skips
// assignments that violate the kind's parameter ordering, and returns the
// best by score; exact ties keep the earliest (lexicographically smallest)
// point. Throws EmptyGrid when nothing survives.
GridResult grid_search_rule(const RuleSpec& rule, const CandleSeries& candles);

// grid_search_rule for each catalog entry, in catalog order.
std::vector<GridResult> optimize_catalog(const std::vector<RuleSpec>& catalog,
                                         const CandleSeries& candles);

// ---------------------------------------------------------------------------
// Chromosome evaluation.
// ---------------------------------------------------------------------------

// max |S w| over the series: the normalizer that maps weighted signal sums
// onto [-1, 1].
double position_scale(const Chromosome& weights, const SignalMatrix& signals);

// Positions from a weighted signal vote, normalized by the series' own peak
// so the strongest bet is full size. All-zero votes give all-flat positions.
PositionSeries positions_from_weights(const Chromosome& weights, const SignalMatrix& signals);

// Same vote but normalized by a scale fixed elsewhere (training data), then
// clipped to [-1, 1]. A non-positive scale gives all-flat positions.
PositionSeries positions_from_weights(const Chromosome& weights, const SignalMatrix& signals,
                                      double scale);

struct FitnessContext {
    const SignalMatrix& signals;
    const ReturnSeries& returns;
    FitnessKind kind = FitnessKind::Ssr;
};

// Sum of per-bar strategy returns.
double fitness_mean_return(const PositionSeries& positions, const ReturnSeries& returns);

// SSR of per-bar strategy returns.
double fitness_ssr(const PositionSeries& positions, const ReturnSeries& returns);

double evaluate_fitness(const Chromosome& weights, const FitnessContext& ctx);

// ---------------------------------------------------------------------------
// Genetic algorithm.
// ---------------------------------------------------------------------------

struct GenerationStats {
    double best_fitness = 0;
    double mean_fitness = 0;
};

struct FitnessTrace {
    std::vector<GenerationStats> generations;  // entry 0 is the initial population
};

// One generation: rank by fitness, carry the single best through unchanged,
// and fill the rest with offspring of two parents drawn uniformly from the
// top parents_mating — uniform crossover with probability crossover_prob,
// then per-gene Gaussian mutation with probability mutation_prob.
std::vector<Chromosome> ga_step(const std::vector<Chromosome>& population, const GAConfig& cfg,
                                const FitnessContext& ctx, Xoshiro256& rng);

// Full run from a uniform [-1, 1] random population. Returns the best
// chromosome ever observed along with the per-generation fitness trace
// (generations + 1 entries).
std::pair<Chromosome, FitnessTrace> ga_evolve(const SignalMatrix& signals,
                                              const ReturnSeries& returns, const GAConfig& cfg);

}  // namespace rulefx
