#include "rulefx/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rulefx {

const char* to_string(FitnessKind kind) {
    return kind == FitnessKind::MeanReturn ? "mr" : "mssr";
}

void GAConfig::validate() const {
    if (population_size < 2) throw ConfigError("population_size must be >= 2");
    if (parents_mating < 1 || parents_mating > population_size)
        throw ConfigError("parents_mating must be in [1, population_size]");
    if (generations < 0) throw ConfigError("generations must be >= 0");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
        throw ConfigError("mutation_prob must be in [0, 1]");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
        throw ConfigError("crossover_prob must be in [0, 1]");
    if (!(mutation_step >= 0.0)) throw ConfigError("mutation_step must be >= 0");
}

// ---------------------------------------------------------------------------
// Grid search.
// ---------------------------------------------------------------------------

GridResult grid_search_rule(const RuleSpec& rule, const CandleSeries& candles) {
    if (rule.grid.empty()) throw EmptyGrid(rule.id);
    for (const auto& axis : rule.grid)
        if (axis.values.empty()) throw EmptyGrid(rule.id);

    const ReturnSeries returns = log_returns(candles);

    GridResult result;
    result.rule_id = rule.id;
    bool found = false;

    // Odometer over the grid axes, first axis slowest. Values inside an axis
    // are enumerated in their declared (ascending) order, so the first
    // best-scoring point is also the lexicographically smallest one and the
    // strict > below settles ties deterministically.
    std::vector<std::size_t> idx(rule.grid.size(), 0);
    for (;;) {
        RuleParams params = rule.defaults;
        for (std::size_t a = 0; a < rule.grid.size(); ++a)
            params.set(rule.grid[a].name, rule.grid[a].values[idx[a]]);

        if (params_valid(rule.kind, params)) {
            const SignalSeries signal = evaluate_rule(rule, candles, params);
            const PositionSeries positions = signal.cast<double>();
            const double score = ssr(strategy_returns(positions, returns));
            result.evaluated.push_back(GridPoint{params, score});
            if (!found || score > result.best_score) {
                found = true;
                result.best_score = score;
                result.best_params = params;
            }
        }

        std::size_t a = rule.grid.size();
        while (a > 0) {
            --a;
            if (++idx[a] < rule.grid[a].values.size()) break;
            idx[a] = 0;
            if (a == 0) {
                if (!found) throw EmptyGrid(rule.id);
                return result;
            }
        }
    }
}

std::vector<GridResult> optimize_catalog(const std::vector<RuleSpec>& catalog,
                                         const CandleSeries& candles) {
    std::vector<GridResult> results;
    results.reserve(catalog.size());
    for (const auto& rule : catalog) results.push_back(grid_search_rule(rule, candles));
    return results;
}

// ---------------------------------------------------------------------------
// Chromosome evaluation.
// ---------------------------------------------------------------------------

double position_scale(const Chromosome& weights, const SignalMatrix& signals) {
    if (weights.size() != signals.cols()) throw DimensionMismatch(weights.size(), signals.cols());
    if (signals.rows() == 0) throw SeriesTooShort("signal matrix has no rows");
    return (signals.cast<double>() * weights).cwiseAbs().maxCoeff();
}

PositionSeries positions_from_weights(const Chromosome& weights, const SignalMatrix& signals) {
    if (weights.size() != signals.cols()) throw DimensionMismatch(weights.size(), signals.cols());
    Eigen::VectorXd raw = signals.cast<double>() * weights;
    const double scale = raw.cwiseAbs().maxCoeff();
    if (scale == 0.0) return PositionSeries::Zero(signals.rows());
    return (raw / scale).array();
}

PositionSeries positions_from_weights(const Chromosome& weights, const SignalMatrix& signals,
                                      double scale) {
    if (weights.size() != signals.cols()) throw DimensionMismatch(weights.size(), signals.cols());
    if (!(scale > 0.0)) return PositionSeries::Zero(signals.rows());
    Eigen::VectorXd raw = signals.cast<double>() * weights;
    return (raw / scale).array().min(1.0).max(-1.0);
}

double fitness_mean_return(const PositionSeries& positions, const ReturnSeries& returns) {
    return strategy_returns(positions, returns).sum();
}

double fitness_ssr(const PositionSeries& positions, const ReturnSeries& returns) {
    return ssr(strategy_returns(positions, returns));
}

double evaluate_fitness(const Chromosome& weights, const FitnessContext& ctx) {
    const PositionSeries positions = positions_from_weights(weights, ctx.signals);
    return ctx.kind == FitnessKind::MeanReturn ? fitness_mean_return(positions, ctx.returns)
                                               : fitness_ssr(positions, ctx.returns);
}

// ---------------------------------------------------------------------------
// Genetic algorithm.
// ---------------------------------------------------------------------------

namespace {

// Population indices ordered best-first; equal fitness keeps the lower index
// first so ranking is deterministic.
std::vector<Eigen::Index> rank_by_fitness(const std::vector<double>& fitness) {
    std::vector<Eigen::Index> order(fitness.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&fitness](Eigen::Index a, Eigen::Index b) { return fitness[a] > fitness[b]; });
    return order;
}

}  // namespace

std::vector<Chromosome> ga_step(const std::vector<Chromosome>& population, const GAConfig& cfg,
                                const FitnessContext& ctx, Xoshiro256& rng) {
    cfg.validate();
    if (static_cast<Eigen::Index>(population.size()) != cfg.population_size)
        throw BadPopulationSize(static_cast<Eigen::Index>(population.size()), cfg.population_size);

    std::vector<double> fitness(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        fitness[i] = evaluate_fitness(population[i], ctx);
    const std::vector<Eigen::Index> order = rank_by_fitness(fitness);

    std::vector<Chromosome> next;
    next.reserve(population.size());
    next.push_back(population[static_cast<std::size_t>(order[0])]);  // elite, untouched

    const auto mating = static_cast<std::uint64_t>(cfg.parents_mating);
    while (next.size() < population.size()) {
        const auto& a = population[static_cast<std::size_t>(order[rng.below(mating)])];
        const auto& b = population[static_cast<std::size_t>(order[rng.below(mating)])];
        Chromosome child = a;
        if (rng.uniform() < cfg.crossover_prob) {
            for (Eigen::Index g = 0; g < child.size(); ++g)
                if (rng.uniform() < 0.5) child[g] = b[g];
        }
        for (Eigen::Index g = 0; g < child.size(); ++g)
            if (rng.uniform() < cfg.mutation_prob) child[g] += cfg.mutation_step * rng.gaussian();
        next.push_back(std::move(child));
    }
    return next;
}

std::pair<Chromosome, FitnessTrace> ga_evolve(const SignalMatrix& signals,
                                              const ReturnSeries& returns, const GAConfig& cfg) {
    cfg.validate();
    if (signals.rows() != returns.size()) throw LengthMismatch(signals.rows(), returns.size());
    if (signals.rows() < 2) throw SeriesTooShort("ga needs at least two bars");

    const FitnessContext ctx{signals, returns, cfg.fitness};
    Xoshiro256 rng(cfg.seed);

    std::vector<Chromosome> population;
    population.reserve(static_cast<std::size_t>(cfg.population_size));
    for (Eigen::Index i = 0; i < cfg.population_size; ++i) {
        Chromosome w(signals.cols());
        for (Eigen::Index g = 0; g < w.size(); ++g) w[g] = rng.uniform(-1.0, 1.0);
        population.push_back(std::move(w));
    }

    FitnessTrace trace;
    trace.generations.reserve(static_cast<std::size_t>(cfg.generations) + 1);
    Chromosome best;
    double best_fitness = 0;
    bool have_best = false;

    for (Eigen::Index gen = 0;; ++gen) {
        GenerationStats stats;
        double sum = 0;
        Eigen::Index arg_best = 0;
        for (std::size_t i = 0; i < population.size(); ++i) {
            const double f = evaluate_fitness(population[i], ctx);
            sum += f;
            if (i == 0 || f > stats.best_fitness) {
                stats.best_fitness = f;
                arg_best = static_cast<Eigen::Index>(i);
            }
        }
        stats.mean_fitness = sum / static_cast<double>(population.size());
        trace.generations.push_back(stats);
        if (!have_best || stats.best_fitness > best_fitness) {
            have_best = true;
            best_fitness = stats.best_fitness;
            best = population[static_cast<std::size_t>(arg_best)];
        }
        if (gen == cfg.generations) break;
        population = ga_step(population, cfg, ctx, rng);
    }
    return {best, trace};
}

}  // namespace rulefx
