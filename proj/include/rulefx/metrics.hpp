#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "rulefx/candles.hpp"
#include "rulefx/errors.hpp"

namespace rulefx {

// Per-bar logarithmic returns; index t holds the return earned over the bar
// ending at t. Index 0 is always 0.
using ReturnSeries = Eigen::ArrayXd;

// Per-bar exposure in [-1, 1]: +1 fully long, -1 fully short.
using PositionSeries = Eigen::ArrayXd;

struct EquityCurve {
    Eigen::ArrayX<std::int64_t> timestamp;
    Eigen::ArrayXd balance;  // starts at 1, strictly positive throughout
    double leverage = 1.0;

    Eigen::Index size() const { return balance.size(); }
};

struct PerformanceReport {
    double roi = 0;             // annualized
    double sharpe = 0;          // on daily log returns
    double max_drawdown = 0;    // <= 0
    double avg_position = 0;    // mean |exposure|
    double ssr = 0;             // on unleveraged per-bar strategy returns
    double total_log_return = 0;
    Eigen::Index trading_days = 0;  // distinct UTC dates spanned
};

// ln(close_t / close_{t-1}) with 0 at index 0. Needs at least two bars.
ReturnSeries log_returns(const CandleSeries& candles);

// Strategy returns under the one-bar execution delay: the position held at
// bar t-1 earns the market return of bar t, so p_0 = 0 and
// p_t = v_{t-1} * r_t.
ReturnSeries strategy_returns(const PositionSeries& positions, const ReturnSeries& returns);

// Total return divided by (population stddev of returns times the magnitude
// of the summed losses). Zero factors in the denominator are floored at
// 1e-12 so the ratio stays finite. Needs at least two entries.
double ssr(const ReturnSeries& returns);

// Compounded balance: balance_t = balance_{t-1} * exp(leverage * p_t),
// starting from 1. Throws AccountBlown at the first bar where the balance
// fails to stay positive.
EquityCurve equity_from_returns(const ReturnSeries& strategy,
                                const Eigen::ArrayX<std::int64_t>& timestamp, double leverage);

// Distinct UTC calendar dates covered by the timestamps.
Eigen::Index trading_days(const Eigen::ArrayX<std::int64_t>& timestamp);

// (final / initial)^(365 / days) - 1.
double roi(const EquityCurve& curve, double days);

// Accumulated daily log return over its population stddev, where a day is a
// UTC calendar date. Throws TooFewDays for fewer than two dates and
// ZeroVolatility when every day's return is identical.
double sharpe(const EquityCurve& curve);

// min(balance) / balance_0 - 1; zero for a curve that never dips.
double max_drawdown(const EquityCurve& curve);

// Mean absolute exposure.
double average_position(const PositionSeries& positions);

}  // namespace rulefx
