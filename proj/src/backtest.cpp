#include "rulefx/backtest.hpp"

#include <cmath>
#include <cstdio>

namespace rulefx {

StrategySpec buy_hold() { return StrategySpec{"B&H", StrategyKind::BuyHold, {}}; }

StrategySpec sell_hold() { return StrategySpec{"S&H", StrategyKind::SellHold, {}}; }

StrategySpec weighted_strategy(std::string name, TrainedWeights trained) {
    return StrategySpec{std::move(name), StrategyKind::Weighted, std::move(trained)};
}

BacktestResult run_backtest(const StrategySpec& strategy, const CandleSeries& candles,
                            const std::vector<RuleSpec>& catalog,
                            const std::vector<RuleParams>& params, double leverage) {
    const ReturnSeries returns = log_returns(candles);

    PositionSeries positions;
    switch (strategy.kind) {
        case StrategyKind::BuyHold:
            positions = PositionSeries::Ones(candles.size());
            break;
        case StrategyKind::SellHold:
            positions = -PositionSeries::Ones(candles.size());
            break;
        case StrategyKind::Weighted: {
            if (strategy.trained.weights.size() == 0)
                throw Error("strategy '" + strategy.name + "' has no trained weights");
            const SignalMatrix features = build_features(candles, catalog, params);
            positions = positions_from_weights(strategy.trained.weights, features,
                                               strategy.trained.scale);
            break;
        }
    }

    const ReturnSeries strat = strategy_returns(positions, returns);
    BacktestResult result;
    result.name = strategy.name;
    result.curve = equity_from_returns(strat, candles.timestamp, leverage);
    result.positions = positions;

    PerformanceReport& rep = result.report;
    rep.total_log_return = strat.sum();
    rep.ssr = ssr(strat);
    rep.trading_days = trading_days(candles.timestamp);
    rep.roi = roi(result.curve, static_cast<double>(rep.trading_days));
    rep.max_drawdown = max_drawdown(result.curve);
    rep.avg_position = average_position(positions);
    try {
        rep.sharpe = sharpe(result.curve);
    } catch (const ZeroVolatility&) {
        // A strategy that never traded has no risk and no return to reward.
        if (rep.total_log_return != 0.0) throw;
        rep.sharpe = 0.0;
    }
    return result;
}

ComparisonTable compare_strategies(const std::vector<StrategySpec>& strategies,
                                   const CandleSeries& candles,
                                   const std::vector<RuleSpec>& catalog,
                                   const std::vector<RuleParams>& params, double leverage) {
    ComparisonTable table;
    table.pair = candles.pair;
    table.leverage = leverage;
    table.rows.reserve(strategies.size());
    for (const auto& s : strategies)
        table.rows.push_back(run_backtest(s, candles, catalog, params, leverage));
    return table;
}

std::string ComparisonTable::to_csv() const {
    std::string out = "strategy,roi,sharpe,max_drawdown,avg_position,ssr,total_log_return,trading_days\n";
    char buf[256];
    for (const auto& row : rows) {
        const PerformanceReport& r = row.report;
        std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%lld\n",
                      row.name.c_str(), r.roi, r.sharpe, r.max_drawdown, r.avg_position, r.ssr,
                      r.total_log_return, static_cast<long long>(r.trading_days));
        out += buf;
    }
    return out;
}

std::string ComparisonTable::to_text() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s  leverage %g  (%lld trading days)\n", pair.c_str(),
                  leverage, rows.empty() ? 0LL : static_cast<long long>(rows[0].report.trading_days));
    std::string out = buf;
    std::snprintf(buf, sizeof buf, "%-10s %12s %10s %10s %8s %14s\n", "strategy", "ROI", "SR", "MD",
                  "AP", "SSR");
    out += buf;
    for (const auto& row : rows) {
        const PerformanceReport& r = row.report;
        // extreme gearing can annualize into astronomically large returns;
        // fall back to scientific notation so the column stays readable
        char roi_cell[32];
        if (std::abs(r.roi) < 1e4)
            std::snprintf(roi_cell, sizeof roi_cell, "%11.2f%%", 100.0 * r.roi);
        else
            std::snprintf(roi_cell, sizeof roi_cell, "%11.3e%%", 100.0 * r.roi);
        std::snprintf(buf, sizeof buf, "%-10s %s %10.3f %9.2f%% %8.2f %14.4f\n", row.name.c_str(),
                      roi_cell, r.sharpe, 100.0 * r.max_drawdown, r.avg_position, r.ssr);
        out += buf;
    }
    return out;
}

}  // namespace rulefx
