#include "rulefx/indicators.hpp"

#include <cmath>

namespace rulefx {

IndicatorSeries IndicatorSeries::from_values(Eigen::ArrayXd v) {
    Eigen::Index warm = 0;
    while (warm < v.size() && std::isnan(v[warm])) ++warm;
    for (Eigen::Index i = warm; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw Error("non-finite indicator value after warmup at index " + std::to_string(i));
    }
    return IndicatorSeries{std::move(v), warm};
}

IndicatorSeries moving_average(const Eigen::ArrayXd& series, Eigen::Index window, MaKind kind) {
    if (series.size() == 0) throw SeriesTooShort("moving average of an empty series");
    switch (kind) {
        case MaKind::Sma:
            return IndicatorSeries::from_values(sma(series, window));
        case MaKind::Ema:
            return IndicatorSeries::from_values(ema(series, window));
        case MaKind::Dema:
            return IndicatorSeries::from_values(dema(series, window));
        case MaKind::Tema:
            return IndicatorSeries::from_values(tema(series, window));
    }
    throw Error("unknown moving average kind");
}

IndicatorSeries rsi(const Eigen::ArrayXd& series, Eigen::Index window) {
    const Eigen::Index n = series.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n - 1) throw WindowExceedsSeries(window, n);

    Eigen::ArrayXd out = Eigen::ArrayXd::Constant(n, detail::kNaN);
    // Wilder smoothed average gain and loss, seeded with plain means of the
    // first `window` one-bar changes.
    double avg_gain = 0, avg_loss = 0;
    for (Eigen::Index t = 1; t <= window; ++t) {
        const double d = series[t] - series[t - 1];
        avg_gain += std::max(d, 0.0);
        avg_loss += std::max(-d, 0.0);
    }
    const auto w = static_cast<double>(window);
    avg_gain /= w;
    avg_loss /= w;

    const auto score = [](double gain, double loss) {
        if (gain == 0.0 && loss == 0.0) return 50.0;
        if (loss == 0.0) return 100.0;
        if (gain == 0.0) return 0.0;
        return 100.0 - 100.0 / (1.0 + gain / loss);
    };

    out[window] = score(avg_gain, avg_loss);
    for (Eigen::Index t = window + 1; t < n; ++t) {
        const double d = series[t] - series[t - 1];
        avg_gain = (avg_gain * (w - 1.0) + std::max(d, 0.0)) / w;
        avg_loss = (avg_loss * (w - 1.0) + std::max(-d, 0.0)) / w;
        out[t] = score(avg_gain, avg_loss);
    }
    return IndicatorSeries::from_values(std::move(out));
}

StochasticResult stochastic(const CandleSeries& candles, Eigen::Index k_window,
                            Eigen::Index d_window) {
    const Eigen::ArrayXd hh = rolling_max(candles.high, k_window);
    const Eigen::ArrayXd ll = rolling_min(candles.low, k_window);

    Eigen::ArrayXd k = Eigen::ArrayXd::Constant(candles.size(), detail::kNaN);
    for (Eigen::Index t = k_window - 1; t < candles.size(); ++t) {
        const double range = hh[t] - ll[t];
        k[t] = range == 0.0 ? 50.0 : 100.0 * (candles.close[t] - ll[t]) / range;
    }
    Eigen::ArrayXd d = sma(k, d_window);
    return StochasticResult{IndicatorSeries::from_values(std::move(k)),
                            IndicatorSeries::from_values(std::move(d))};
}

Bands bollinger(const Eigen::ArrayXd& series, Eigen::Index window, double width) {
    if (window < 2) throw Error("bollinger window must be >= 2");
    if (!(width > 0.0)) throw Error("band width must be positive");
    const Eigen::ArrayXd mid = sma(series, window);
    const Eigen::ArrayXd sd = rolling_std(series, window);
    return Bands{IndicatorSeries::from_values(mid + width * sd),
                 IndicatorSeries::from_values(mid),
                 IndicatorSeries::from_values(mid - width * sd)};
}

Eigen::ArrayXd true_range(const CandleSeries& candles) {
    const Eigen::Index n = candles.size();
    Eigen::ArrayXd tr = Eigen::ArrayXd::Constant(n, detail::kNaN);
    for (Eigen::Index t = 1; t < n; ++t) {
        const double prev_close = candles.close[t - 1];
        tr[t] = std::max(candles.high[t], prev_close) - std::min(candles.low[t], prev_close);
    }
    return tr;
}

VortexResult vortex(const CandleSeries& candles, Eigen::Index window) {
    const Eigen::Index n = candles.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n - 1) throw WindowExceedsSeries(window, n);

    Eigen::ArrayXd vm_plus = Eigen::ArrayXd::Constant(n, detail::kNaN);
    Eigen::ArrayXd vm_minus = Eigen::ArrayXd::Constant(n, detail::kNaN);
    for (Eigen::Index t = 1; t < n; ++t) {
        vm_plus[t] = std::abs(candles.high[t] - candles.low[t - 1]);
        vm_minus[t] = std::abs(candles.low[t] - candles.high[t - 1]);
    }
    const Eigen::ArrayXd sum_plus = rolling_sum(vm_plus, window);
    const Eigen::ArrayXd sum_minus = rolling_sum(vm_minus, window);
    const Eigen::ArrayXd sum_tr = rolling_sum(true_range(candles), window);

    Eigen::ArrayXd plus = Eigen::ArrayXd::Constant(n, detail::kNaN);
    Eigen::ArrayXd minus = Eigen::ArrayXd::Constant(n, detail::kNaN);
    for (Eigen::Index t = window; t < n; ++t) {
        if (sum_tr[t] == 0.0) {
            // A window with no range carries no directional information.
            plus[t] = 1.0;
            minus[t] = 1.0;
        } else {
            plus[t] = sum_plus[t] / sum_tr[t];
            minus[t] = sum_minus[t] / sum_tr[t];
        }
    }
    return VortexResult{IndicatorSeries::from_values(std::move(plus)),
                        IndicatorSeries::from_values(std::move(minus))};
}

Bands keltner(const CandleSeries& candles, Eigen::Index window, double width) {
    if (!(width > 0.0)) throw Error("band width must be positive");
    const Eigen::Index n = candles.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n - 1) throw WindowExceedsSeries(window, n);

    const Eigen::ArrayXd mid = ema(candles.close, window);
    const Eigen::ArrayXd atr = wilder_smooth(true_range(candles), window);
    return Bands{IndicatorSeries::from_values(mid + width * atr),
                 IndicatorSeries::from_values(mid),
                 IndicatorSeries::from_values(mid - width * atr)};
}

namespace {

Eigen::ArrayXd midline(const CandleSeries& candles, Eigen::Index window) {
    return 0.5 * (rolling_max(candles.high, window) + rolling_min(candles.low, window));
}

}  // namespace

IchimokuResult ichimoku(const CandleSeries& candles, Eigen::Index tenkan, Eigen::Index kijun,
                        Eigen::Index senkou_b) {
    if (tenkan < 1) throw Error("window must be >= 1");
    if (!(tenkan <= kijun && kijun <= senkou_b))
        throw InvalidWindowOrder("ichimoku windows must satisfy tenkan <= kijun <= senkou_b");

    const Eigen::ArrayXd t_line = midline(candles, tenkan);
    const Eigen::ArrayXd k_line = midline(candles, kijun);
    const Eigen::ArrayXd b_line = midline(candles, senkou_b);
    return IchimokuResult{IndicatorSeries::from_values(t_line),
                          IndicatorSeries::from_values(k_line),
                          IndicatorSeries::from_values(0.5 * (t_line + k_line)),
                          IndicatorSeries::from_values(b_line)};
}

}  // namespace rulefx
