#pragma once

#include <string>
#include <vector>

#include "rulefx/candles.hpp"
#include "rulefx/metrics.hpp"
#include "rulefx/optimize.hpp"
#include "rulefx/rules.hpp"

namespace rulefx {

enum class StrategyKind { BuyHold, SellHold, Weighted };

// Everything a training run produces that a later backtest needs: the rule
// catalog with tuned parameters, plus a weight vector and the normalization
// scale that was fixed on the training span.
struct TrainedWeights {
    Chromosome weights;
    double scale = 0;
    double fitness = 0;
    FitnessKind kind = FitnessKind::Ssr;
    std::uint64_t seed = 0;
};

struct StrategySpec {
    std::string name;  // report label, e.g. "B&H" or "GA-MSSR"
    StrategyKind kind = StrategyKind::BuyHold;
    TrainedWeights trained;  // Weighted only
};

StrategySpec buy_hold();
StrategySpec sell_hold();
StrategySpec weighted_strategy(std::string name, TrainedWeights trained);

struct BacktestResult {
    std::string name;
    PerformanceReport report;
    EquityCurve curve;
    PositionSeries positions;
};

// Runs one strategy over a candle span. For Weighted strategies the feature
// matrix is built from the catalog with the tuned parameters and positions
// use the training-time normalization scale.
BacktestResult run_backtest(const StrategySpec& strategy, const CandleSeries& candles,
                            const std::vector<RuleSpec>& catalog,
                            const std::vector<RuleParams>& params, double leverage);

struct ComparisonTable {
    std::string pair;
    double leverage = 1.0;
    std::vector<BacktestResult> rows;  // input order

    std::string to_csv() const;
    std::string to_text() const;  // aligned, percent-formatted
};

ComparisonTable compare_strategies(const std::vector<StrategySpec>& strategies,
                                   const CandleSeries& candles,
                                   const std::vector<RuleSpec>& catalog,
                                   const std::vector<RuleParams>& params, double leverage);

}  // namespace rulefx
