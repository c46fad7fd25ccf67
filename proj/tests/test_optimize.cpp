#include "rulefx/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "rulefx/candles.hpp"
#include "rulefx/metrics.hpp"
#include "rulefx/rng.hpp"

using namespace rulefx;
using Eigen::Index;

namespace {

CandleSeries synth_series(std::uint64_t seed, Index n, Regime regime = Regime::RandomWalk) {
    return synthesize(seed, n, regime);
}

RuleSpec fast_slow_rule() {
    RuleSpec rule;
    rule.id = "sma_x_sma";
    rule.kind = RuleKind::SmaXSma;
    rule.defaults = RuleParams{{"fast", 10}, {"slow", 50}};
    rule.grid = {{"fast", {2, 5, 9}}, {"slow", {3, 8, 21}}};
    return rule;
}

SignalMatrix random_signals(std::uint64_t seed, Index rows, Index cols) {
    Xoshiro256 rng(seed);
    SignalMatrix s(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) s(i, j) = static_cast<int>(rng.below(3)) - 1;
    return s;
}

ReturnSeries random_returns(std::uint64_t seed, Index n) {
    Xoshiro256 rng(seed);
    ReturnSeries r(n);
    r[0] = 0;
    for (Index t = 1; t < n; ++t) r[t] = 0.003 * rng.gaussian();
    return r;
}

}  // namespace

TEST(GridSearch, EnumeratesTheFilteredCartesianProductInOrder) {
    const CandleSeries c = synth_series(11, 200);
    const GridResult res = grid_search_rule(fast_slow_rule(), c);

    // fast < slow filters 9 combinations down to 6, first axis slowest
    const std::vector<std::pair<int, int>> expected = {
        {2, 3}, {2, 8}, {2, 21}, {5, 8}, {5, 21}, {9, 21}};
    ASSERT_EQ(res.evaluated.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(res.evaluated[i].params.get_window("fast"), expected[i].first);
        EXPECT_EQ(res.evaluated[i].params.get_window("slow"), expected[i].second);
    }
}

TEST(GridSearch, BestMatchesAnIndependentRescan) {
    const CandleSeries c = synth_series(12, 240);
    const RuleSpec rule = fast_slow_rule();
    const GridResult res = grid_search_rule(rule, c);
    const ReturnSeries r = log_returns(c);

    double best = -std::numeric_limits<double>::infinity();
    RuleParams best_params;
    for (const GridPoint& point : res.evaluated) {
        const SignalSeries sig = evaluate_rule(rule, c, point.params);
        const double score = ssr(strategy_returns(sig.cast<double>(), r));
        EXPECT_DOUBLE_EQ(point.score, score);
        if (score > best) {
            best = score;
            best_params = point.params;
        }
    }
    EXPECT_DOUBLE_EQ(res.best_score, best);
    EXPECT_EQ(res.best_params, best_params);
    EXPECT_EQ(res.rule_id, rule.id);
}

TEST(GridSearch, ExactTiesKeepTheEarliestPoint) {
    // a constant market produces all-flat signals, so every point scores 0
    CandleSeries c;
    const Index n = 60;
    c.pair = "FLAT";
    c.bar_interval = 300;
    c.timestamp.resize(n);
    c.open = Eigen::ArrayXd::Constant(n, 1.0);
    c.high = Eigen::ArrayXd::Constant(n, 1.0);
    c.low = Eigen::ArrayXd::Constant(n, 1.0);
    c.close = Eigen::ArrayXd::Constant(n, 1.0);
    for (Index t = 0; t < n; ++t) c.timestamp[t] = 300 * t;

    const GridResult res = grid_search_rule(fast_slow_rule(), c);
    EXPECT_DOUBLE_EQ(res.best_score, 0.0);
    EXPECT_EQ(res.best_params.get_window("fast"), 2);
    EXPECT_EQ(res.best_params.get_window("slow"), 3);
}

TEST(GridSearch, ThrowsWhenEveryPointIsFilteredOut) {
    RuleSpec rule = fast_slow_rule();
    rule.grid = {{"fast", {50}}, {"slow", {10}}};
    EXPECT_THROW(grid_search_rule(rule, synth_series(13, 100)), EmptyGrid);
}

TEST(GridSearch, CatalogRunsEveryRuleInOrder) {
    // shrink the stock grids so the sweep stays fast
    std::vector<RuleSpec> catalog = default_catalog();
    for (RuleSpec& rule : catalog)
        for (ParamRange& axis : rule.grid)
            if (axis.values.size() > 3)
                axis.values = {axis.values.front(), axis.values[axis.values.size() / 2],
                               axis.values.back()};
    const CandleSeries c = synth_series(14, 300);
    const std::vector<GridResult> results = optimize_catalog(catalog, c);
    ASSERT_EQ(results.size(), catalog.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        EXPECT_EQ(results[i].rule_id, catalog[i].id);
        EXPECT_FALSE(results[i].evaluated.empty());
    }
}

TEST(Positions, NormalizationPutsThePeakVoteAtFullSize) {
    SignalMatrix s(5, 2);
    s << 1, 0, -1, 1, 1, 1, 0, 0, -1, -1;
    Chromosome w(2);
    w << 0.5, 0.25;
    // raw votes: 0.5, -0.25, 0.75, 0, -0.75 -> scale 0.75
    EXPECT_DOUBLE_EQ(position_scale(w, s), 0.75);

    const PositionSeries v = positions_from_weights(w, s);
    ASSERT_EQ(v.size(), 5);
    EXPECT_DOUBLE_EQ(v[0], 0.5 / 0.75);
    EXPECT_DOUBLE_EQ(v[1], -0.25 / 0.75);
    EXPECT_DOUBLE_EQ(v[2], 1.0);
    EXPECT_DOUBLE_EQ(v[3], 0.0);
    EXPECT_DOUBLE_EQ(v[4], -1.0);
    EXPECT_DOUBLE_EQ(v.abs().maxCoeff(), 1.0);
}

TEST(Positions, FixedScaleClipsOutOfSampleVotes) {
    SignalMatrix s(5, 2);
    s << 1, 0, -1, 1, 1, 1, 0, 0, -1, -1;
    Chromosome w(2);
    w << 0.5, 0.25;
    const PositionSeries v = positions_from_weights(w, s, 0.5);
    EXPECT_DOUBLE_EQ(v[0], 1.0);    // 0.5/0.5
    EXPECT_DOUBLE_EQ(v[1], -0.5);   // -0.25/0.5
    EXPECT_DOUBLE_EQ(v[2], 1.0);    // 1.5 clipped
    EXPECT_DOUBLE_EQ(v[4], -1.0);   // -1.5 clipped
}

TEST(Positions, DegenerateVotesGoFlat) {
    SignalMatrix s = random_signals(21, 50, 3);
    const Chromosome zero = Chromosome::Zero(3);
    EXPECT_DOUBLE_EQ(position_scale(zero, s), 0.0);
    EXPECT_TRUE((positions_from_weights(zero, s) == 0.0).all());
    Chromosome w(3);
    w << 1, -1, 0.5;
    EXPECT_TRUE((positions_from_weights(w, s, 0.0) == 0.0).all());
    EXPECT_TRUE((positions_from_weights(w, s, -2.0) == 0.0).all());

    Chromosome wrong(2);
    wrong << 1, 1;
    EXPECT_THROW(position_scale(wrong, s), DimensionMismatch);
    EXPECT_THROW(positions_from_weights(wrong, s), DimensionMismatch);
}

TEST(Fitness, BothObjectivesMatchTheMetricsModule) {
    const SignalMatrix s = random_signals(31, 300, 4);
    const ReturnSeries r = random_returns(32, 300);
    Chromosome w(4);
    w << 0.7, -0.2, 0.1, 0.4;
    const PositionSeries v = positions_from_weights(w, s);
    const ReturnSeries p = strategy_returns(v, r);

    EXPECT_DOUBLE_EQ(fitness_mean_return(v, r), p.sum());
    EXPECT_DOUBLE_EQ(fitness_ssr(v, r), ssr(p));

    const FitnessContext mr{s, r, FitnessKind::MeanReturn};
    const FitnessContext mssr{s, r, FitnessKind::Ssr};
    EXPECT_DOUBLE_EQ(evaluate_fitness(w, mr), p.sum());
    EXPECT_DOUBLE_EQ(evaluate_fitness(w, mssr), ssr(p));
}

TEST(Ga, ConfigValidationRejectsOutOfRangeValues) {
    GAConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.population_size = 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.parents_mating = 11;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.mutation_prob = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.crossover_prob = -0.1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.mutation_step = -1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = GAConfig{};
    cfg.generations = -1;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Ga, StepCarriesTheBestThroughUntouched) {
    const SignalMatrix s = random_signals(41, 200, 3);
    const ReturnSeries r = random_returns(42, 200);
    const FitnessContext ctx{s, r, FitnessKind::MeanReturn};

    GAConfig cfg;
    cfg.population_size = 6;
    cfg.parents_mating = 3;
    cfg.mutation_prob = 1.0;  // churn everything that is not elite
    Xoshiro256 rng(7);

    std::vector<Chromosome> pop;
    for (Index i = 0; i < cfg.population_size; ++i)
        pop.push_back(Chromosome::Random(3));  // deterministic under Eigen's default seed

    double best = -std::numeric_limits<double>::infinity();
    Chromosome best_w;
    for (const Chromosome& w : pop) {
        const double f = evaluate_fitness(w, ctx);
        if (f > best) {
            best = f;
            best_w = w;
        }
    }

    const std::vector<Chromosome> next = ga_step(pop, cfg, ctx, rng);
    ASSERT_EQ(next.size(), pop.size());
    EXPECT_TRUE(next[0] == best_w);  // bitwise identical, not merely close
}

TEST(Ga, StepValidatesThePopulationShape) {
    const SignalMatrix s = random_signals(43, 50, 2);
    const ReturnSeries r = random_returns(44, 50);
    const FitnessContext ctx{s, r, FitnessKind::Ssr};
    GAConfig cfg;
    Xoshiro256 rng(1);
    std::vector<Chromosome> pop(4, Chromosome::Zero(2));  // config says 10
    EXPECT_THROW(ga_step(pop, cfg, ctx, rng), BadPopulationSize);
}

TEST(Ga, ZeroedOperatorsReduceToPureSelection) {
    const SignalMatrix s = random_signals(51, 150, 3);
    const ReturnSeries r = random_returns(52, 150);
    const FitnessContext ctx{s, r, FitnessKind::MeanReturn};

    GAConfig cfg;
    cfg.population_size = 5;
    cfg.parents_mating = 2;
    cfg.mutation_prob = 0.0;
    cfg.crossover_prob = 0.0;
    Xoshiro256 rng(9);

    std::vector<Chromosome> pop;
    for (Index i = 0; i < cfg.population_size; ++i) pop.push_back(Chromosome::Random(3));

    const std::vector<Chromosome> next = ga_step(pop, cfg, ctx, rng);
    // with no variation every child is a verbatim copy of some parent
    for (const Chromosome& child : next) {
        bool found = false;
        for (const Chromosome& parent : pop) found = found || (child == parent);
        EXPECT_TRUE(found);
    }
}

TEST(Ga, EvolveIsSeedDeterministicWithAFullTrace) {
    const SignalMatrix s = random_signals(61, 250, 5);
    const ReturnSeries r = random_returns(62, 250);

    GAConfig cfg;
    cfg.generations = 30;
    cfg.seed = 4242;
    cfg.fitness = FitnessKind::Ssr;

    const auto [w1, t1] = ga_evolve(s, r, cfg);
    const auto [w2, t2] = ga_evolve(s, r, cfg);
    EXPECT_TRUE(w1 == w2);
    ASSERT_EQ(t1.generations.size(), static_cast<std::size_t>(cfg.generations) + 1);
    ASSERT_EQ(t2.generations.size(), t1.generations.size());
    for (std::size_t g = 0; g < t1.generations.size(); ++g) {
        EXPECT_EQ(t1.generations[g].best_fitness, t2.generations[g].best_fitness);
        EXPECT_EQ(t1.generations[g].mean_fitness, t2.generations[g].mean_fitness);
    }

    cfg.seed = 4243;
    const auto [w3, t3] = ga_evolve(s, r, cfg);
    EXPECT_FALSE(w1 == w3);  // different seed explores a different path
}

TEST(Ga, ElitismMakesTheBestTraceNonDecreasing) {
    const SignalMatrix s = random_signals(71, 300, 6);
    const ReturnSeries r = random_returns(72, 300);

    GAConfig cfg;
    cfg.generations = 40;
    cfg.seed = 5;
    cfg.fitness = FitnessKind::MeanReturn;

    const auto [w, trace] = ga_evolve(s, r, cfg);
    double running = -std::numeric_limits<double>::infinity();
    for (const GenerationStats& g : trace.generations) {
        EXPECT_GE(g.best_fitness, running);
        running = g.best_fitness;
        EXPECT_LE(g.mean_fitness, g.best_fitness);
    }
    // the returned chromosome reproduces the final best fitness
    const FitnessContext ctx{s, r, cfg.fitness};
    EXPECT_DOUBLE_EQ(evaluate_fitness(w, ctx), trace.generations.back().best_fitness);
}

TEST(Ga, EvolveValidatesItsInputs) {
    GAConfig cfg;
    const SignalMatrix s = random_signals(81, 100, 3);
    EXPECT_THROW(ga_evolve(s, random_returns(82, 99), cfg), LengthMismatch);
    EXPECT_THROW(ga_evolve(random_signals(83, 1, 3), random_returns(84, 1).head(1).eval(), cfg),
                 SeriesTooShort);
}

TEST(Ga, FindsAPlantedPerfectPredictor) {
    // column 0 foretells the sign of the next bar's return; the rest is noise
    const Index n = 120;
    const ReturnSeries r = random_returns(91, n);
    SignalMatrix s = random_signals(92, n, 3);
    for (Index t = 0; t + 1 < n; ++t)
        s(t, 0) = r[t + 1] > 0 ? 1 : (r[t + 1] < 0 ? -1 : 0);
    s(n - 1, 0) = 0;

    GAConfig cfg;
    cfg.generations = 150;
    cfg.seed = 77;
    cfg.fitness = FitnessKind::MeanReturn;

    Chromosome one_hot = Chromosome::Zero(3);
    one_hot[0] = 1.0;
    const FitnessContext ctx{s, r, cfg.fitness};
    const double ceiling = evaluate_fitness(one_hot, ctx);
    ASSERT_GT(ceiling, 0.0);

    const auto [w, trace] = ga_evolve(s, r, cfg);
    EXPECT_GE(evaluate_fitness(w, ctx), 0.9 * ceiling);
}
