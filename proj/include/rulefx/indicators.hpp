#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <type_traits>

#include "rulefx/candles.hpp"
#include "rulefx/errors.hpp"

namespace rulefx {

// A derived series aligned index-for-index with its source. Exactly the first
// `warmup` entries are NaN; everything after is finite. No value at index t
// uses information from any bar after t.
struct IndicatorSeries {
    Eigen::ArrayXd values;
    Eigen::Index warmup = 0;

    Eigen::Index size() const { return values.size(); }
    bool defined(Eigen::Index i) const { return i >= warmup; }

    // Derives warmup from the leading NaN run; rejects NaN or infinity after it.
    static IndicatorSeries from_values(Eigen::ArrayXd v);
};

enum class MaKind { Sma, Ema, Dema, Tema };

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Scalar>
Eigen::Index first_defined(const Eigen::ArrayX<Scalar>& x) {
    Eigen::Index i = 0;
    while (i < x.size() && std::isnan(x[i])) ++i;
    return i;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalar kernels. Each accepts any dense Eigen array expression, tolerates a
// leading NaN prefix (so kernels compose, e.g. EMA of EMA), and produces a
// NaN-prefixed array of the same length in one forward pass. A window larger
// than the whole series throws; a window that merely exceeds the defined
// suffix yields an all-NaN result so compositions degrade gracefully.
// ---------------------------------------------------------------------------

template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> sma(const Eigen::ArrayBase<Derived>& input,
                                            Eigen::Index window) {
    using Scalar = typename Derived::Scalar;
    static_assert(std::is_floating_point_v<Scalar>);
    const Eigen::ArrayX<Scalar> x = input;
    const Eigen::Index n = x.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n) throw WindowExceedsSeries(window, n);

    Eigen::ArrayX<Scalar> out = Eigen::ArrayX<Scalar>::Constant(n, Scalar(detail::kNaN));
    const Eigen::Index d0 = detail::first_defined(x);
    if (n - d0 < window) return out;

    Scalar sum = 0;
    for (Eigen::Index i = d0; i < n; ++i) {
        sum += x[i];
        if (i - d0 >= window) sum -= x[i - window];
        if (i - d0 >= window - 1) out[i] = sum / static_cast<Scalar>(window);
    }
    return out;
}

// EMA with alpha = 2/(window+1), seeded with the SMA of the first window so
// the warmup is bounded.
template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> ema(const Eigen::ArrayBase<Derived>& input,
                                            Eigen::Index window) {
    using Scalar = typename Derived::Scalar;
    static_assert(std::is_floating_point_v<Scalar>);
    const Eigen::ArrayX<Scalar> x = input;
    const Eigen::Index n = x.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n) throw WindowExceedsSeries(window, n);

    Eigen::ArrayX<Scalar> out = Eigen::ArrayX<Scalar>::Constant(n, Scalar(detail::kNaN));
    const Eigen::Index d0 = detail::first_defined(x);
    if (n - d0 < window) return out;

    const Scalar alpha = Scalar(2) / static_cast<Scalar>(window + 1);
    Scalar seed = 0;
    for (Eigen::Index i = d0; i < d0 + window; ++i) seed += x[i];
    seed /= static_cast<Scalar>(window);
    out[d0 + window - 1] = seed;
    for (Eigen::Index i = d0 + window; i < n; ++i)
        out[i] = alpha * x[i] + (Scalar(1) - alpha) * out[i - 1];
    return out;
}

template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> dema(const Eigen::ArrayBase<Derived>& input,
                                             Eigen::Index window) {
    const auto e1 = ema(input, window);
    const auto e2 = ema(e1, window);
    return 2 * e1 - e2;  // NaN prefix propagates from e2
}

template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> tema(const Eigen::ArrayBase<Derived>& input,
                                             Eigen::Index window) {
    const auto e1 = ema(input, window);
    const auto e2 = ema(e1, window);
    const auto e3 = ema(e2, window);
    return 3 * e1 - 3 * e2 + e3;
}

// Rolling extrema over a trailing window, monotonic-deque based, O(n) total.
template <typename Derived, bool kMax>
Eigen::ArrayX<typename Derived::Scalar> rolling_extremum(const Eigen::ArrayBase<Derived>& input,
                                                         Eigen::Index window) {
    using Scalar = typename Derived::Scalar;
    static_assert(std::is_floating_point_v<Scalar>);
    const Eigen::ArrayX<Scalar> x = input;
    const Eigen::Index n = x.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n) throw WindowExceedsSeries(window, n);

    Eigen::ArrayX<Scalar> out = Eigen::ArrayX<Scalar>::Constant(n, Scalar(detail::kNaN));
    const Eigen::Index d0 = detail::first_defined(x);
    if (n - d0 < window) return out;

    std::vector<Eigen::Index> deque;  // indices, extremum at the front
    deque.reserve(static_cast<std::size_t>(window) + 1);
    std::size_t head = 0;
    for (Eigen::Index i = d0; i < n; ++i) {
        while (deque.size() > head &&
               (kMax ? x[deque.back()] <= x[i] : x[deque.back()] >= x[i]))
            deque.pop_back();
        deque.push_back(i);
        if (deque[head] <= i - window) ++head;
        if (i - d0 >= window - 1) out[i] = x[deque[head]];
    }
    return out;
}

template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> rolling_max(const Eigen::ArrayBase<Derived>& input,
                                                    Eigen::Index window) {
    return rolling_extremum<Derived, true>(input, window);
}

template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> rolling_min(const Eigen::ArrayBase<Derived>& input,
                                                    Eigen::Index window) {
    return rolling_extremum<Derived, false>(input, window);
}

// Rolling population standard deviation (divide by n). Sums run against the
// first defined value as an offset, which keeps the E[x^2]-E[x]^2 form from
// cancelling when the series sits far from zero.
template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> rolling_std(const Eigen::ArrayBase<Derived>& input,
                                                    Eigen::Index window) {
    using Scalar = typename Derived::Scalar;
    static_assert(std::is_floating_point_v<Scalar>);
    const Eigen::ArrayX<Scalar> x = input;
    const Eigen::Index n = x.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n) throw WindowExceedsSeries(window, n);

    Eigen::ArrayX<Scalar> out = Eigen::ArrayX<Scalar>::Constant(n, Scalar(detail::kNaN));
    const Eigen::Index d0 = detail::first_defined(x);
    if (n - d0 < window) return out;

    const Scalar base = x[d0];
    Scalar s1 = 0, s2 = 0;
    const auto w = static_cast<Scalar>(window);
    for (Eigen::Index i = d0; i < n; ++i) {
        const Scalar v = x[i] - base;
        s1 += v;
        s2 += v * v;
        if (i - d0 >= window) {
            const Scalar u = x[i - window] - base;
            s1 -= u;
            s2 -= u * u;
        }
        if (i - d0 >= window - 1) {
            const Scalar mean = s1 / w;
            out[i] = std::sqrt(std::max(s2 / w - mean * mean, Scalar(0)));
        }
    }
    return out;
}

// Rolling sum over a trailing window.
template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> rolling_sum(const Eigen::ArrayBase<Derived>& input,
                                                    Eigen::Index window) {
    using Scalar = typename Derived::Scalar;
    static_assert(std::is_floating_point_v<Scalar>);
    const Eigen::ArrayX<Scalar> x = input;
    const Eigen::Index n = x.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n) throw WindowExceedsSeries(window, n);

    Eigen::ArrayX<Scalar> out = Eigen::ArrayX<Scalar>::Constant(n, Scalar(detail::kNaN));
    const Eigen::Index d0 = detail::first_defined(x);
    if (n - d0 < window) return out;

    Scalar sum = 0;
    for (Eigen::Index i = d0; i < n; ++i) {
        sum += x[i];
        if (i - d0 >= window) sum -= x[i - window];
        if (i - d0 >= window - 1) out[i] = sum;
    }
    return out;
}

// Wilder smoothing: seed with the mean of the first window, then
// out = (prev*(window-1) + x) / window.
template <typename Derived>
Eigen::ArrayX<typename Derived::Scalar> wilder_smooth(const Eigen::ArrayBase<Derived>& input,
                                                      Eigen::Index window) {
    using Scalar = typename Derived::Scalar;
    static_assert(std::is_floating_point_v<Scalar>);
    const Eigen::ArrayX<Scalar> x = input;
    const Eigen::Index n = x.size();
    if (window < 1) throw Error("window must be >= 1");
    if (window > n) throw WindowExceedsSeries(window, n);

    Eigen::ArrayX<Scalar> out = Eigen::ArrayX<Scalar>::Constant(n, Scalar(detail::kNaN));
    const Eigen::Index d0 = detail::first_defined(x);
    if (n - d0 < window) return out;

    Scalar seed = 0;
    for (Eigen::Index i = d0; i < d0 + window; ++i) seed += x[i];
    out[d0 + window - 1] = seed / static_cast<Scalar>(window);
    const auto w = static_cast<Scalar>(window);
    for (Eigen::Index i = d0 + window; i < n; ++i)
        out[i] = (out[i - 1] * (w - Scalar(1)) + x[i]) / w;
    return out;
}

// ---------------------------------------------------------------------------
// Candle-level indicators.
// ---------------------------------------------------------------------------

struct Bands {
    IndicatorSeries upper;
    IndicatorSeries middle;
    IndicatorSeries lower;
};

struct StochasticResult {
    IndicatorSeries percent_k;
    IndicatorSeries percent_d;
};

struct VortexResult {
    IndicatorSeries plus;
    IndicatorSeries minus;
};

struct IchimokuResult {
    IndicatorSeries tenkan_sen;
    IndicatorSeries kijun_sen;
    IndicatorSeries senkou_a;
    IndicatorSeries senkou_b;
};

IndicatorSeries moving_average(const Eigen::ArrayXd& series, Eigen::Index window, MaKind kind);

// Wilder RSI in [0, 100]. All-gain windows read 100, all-loss 0, a perfectly
// flat window 50.
IndicatorSeries rsi(const Eigen::ArrayXd& series, Eigen::Index window);

// %K = 100 * (close - lowest low) / (highest high - lowest low), 50 when the
// window is flat; %D = SMA(%K, d_window).
StochasticResult stochastic(const CandleSeries& candles, Eigen::Index k_window,
                            Eigen::Index d_window);

// middle = SMA(window), upper/lower = middle +/- width * rolling population
// stddev. window must be >= 2.
Bands bollinger(const Eigen::ArrayXd& series, Eigen::Index window, double width);

// VI+/- = rolling sum of vortex movements over rolling sum of true range.
VortexResult vortex(const CandleSeries& candles, Eigen::Index window);

// middle = EMA(close, window), upper/lower = middle +/- width * Wilder ATR.
Bands keltner(const CandleSeries& candles, Eigen::Index window, double width);

// Rolling (highest high + lowest low) / 2 midlines. The classical forward
// displacement of the senkou spans is omitted so every value stays aligned
// with the bar it was computed from.
IchimokuResult ichimoku(const CandleSeries& candles, Eigen::Index tenkan, Eigen::Index kijun,
                        Eigen::Index senkou_b);

// True range: max(high_t, close_{t-1}) - min(low_t, close_{t-1}); NaN at t=0.
Eigen::ArrayXd true_range(const CandleSeries& candles);

}  // namespace rulefx
