#include "rulefx/metrics.hpp"

#include <cmath>

namespace rulefx {

namespace {

constexpr double kEps = 1e-12;
constexpr std::int64_t kSecondsPerDay = 86400;

// Floor division so pre-1970 timestamps still land on the right date.
std::int64_t utc_date(std::int64_t ts) {
    std::int64_t d = ts / kSecondsPerDay;
    if (ts % kSecondsPerDay < 0) --d;
    return d;
}

}  // namespace

ReturnSeries log_returns(const CandleSeries& candles) {
    const Eigen::Index n = candles.size();
    if (n < 2) throw SeriesTooShort("log returns need at least two bars");
    ReturnSeries r = ReturnSeries::Zero(n);
    for (Eigen::Index t = 1; t < n; ++t) r[t] = std::log(candles.close[t] / candles.close[t - 1]);
    return r;
}

ReturnSeries strategy_returns(const PositionSeries& positions, const ReturnSeries& returns) {
    if (positions.size() != returns.size())
        throw LengthMismatch(positions.size(), returns.size());
    ReturnSeries p = ReturnSeries::Zero(returns.size());
    for (Eigen::Index t = 1; t < returns.size(); ++t) p[t] = positions[t - 1] * returns[t];
    return p;
}

double ssr(const ReturnSeries& returns) {
    const Eigen::Index n = returns.size();
    if (n < 2) throw SeriesTooShort("ssr needs at least two returns");
    const double total = returns.sum();
    const double mean = total / static_cast<double>(n);
    const double sigma = std::sqrt((returns - mean).square().sum() / static_cast<double>(n));
    const double losses = -returns.min(0.0).sum();
    return total / (std::max(sigma, kEps) * std::max(losses, kEps));
}

EquityCurve equity_from_returns(const ReturnSeries& strategy,
                                const Eigen::ArrayX<std::int64_t>& timestamp, double leverage) {
    if (strategy.size() != timestamp.size())
        throw LengthMismatch(strategy.size(), timestamp.size());
    EquityCurve curve;
    curve.timestamp = timestamp;
    curve.leverage = leverage;
    curve.balance.resize(strategy.size());
    double balance = 1.0;
    for (Eigen::Index t = 0; t < strategy.size(); ++t) {
        balance *= std::exp(leverage * strategy[t]);
        if (!(balance > 0.0)) throw AccountBlown(t);
        curve.balance[t] = balance;
    }
    return curve;
}

Eigen::Index trading_days(const Eigen::ArrayX<std::int64_t>& timestamp) {
    Eigen::Index days = 0;
    for (Eigen::Index t = 0; t < timestamp.size(); ++t) {
        if (t == 0 || utc_date(timestamp[t]) != utc_date(timestamp[t - 1])) ++days;
    }
    return days;
}

double roi(const EquityCurve& curve, double days) {
    if (curve.size() == 0) throw SeriesTooShort("roi needs a non-empty curve");
    if (!(days >= 1.0)) throw Error("roi needs at least one trading day");
    return std::pow(curve.balance[curve.size() - 1] / curve.balance[0], 365.0 / days) - 1.0;
}

double sharpe(const EquityCurve& curve) {
    std::vector<double> daily;
    double prev_close = 1.0;  // balance before the first bar
    for (Eigen::Index t = 0; t < curve.size(); ++t) {
        const bool last_of_day = t + 1 == curve.size() ||
                                 utc_date(curve.timestamp[t + 1]) != utc_date(curve.timestamp[t]);
        if (!last_of_day) continue;
        daily.push_back(std::log(curve.balance[t] / prev_close));
        prev_close = curve.balance[t];
    }
    const auto n = static_cast<double>(daily.size());
    if (daily.size() < 2) throw TooFewDays(static_cast<Eigen::Index>(daily.size()));

    double total = 0;
    for (double d : daily) total += d;
    const double mean = total / n;
    double var = 0;
    for (double d : daily) var += (d - mean) * (d - mean);
    const double sigma = std::sqrt(var / n);
    if (sigma == 0.0) throw ZeroVolatility();
    return total / sigma;
}

double max_drawdown(const EquityCurve& curve) {
    if (curve.size() == 0) throw SeriesTooShort("drawdown needs a non-empty curve");
    return std::min(curve.balance.minCoeff() / curve.balance[0] - 1.0, 0.0);
}

double average_position(const PositionSeries& positions) {
    if (positions.size() == 0) throw SeriesTooShort("exposure needs a non-empty series");
    return positions.abs().mean();
}

}  // namespace rulefx
