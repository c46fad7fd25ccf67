#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rulefx/errors.hpp"

namespace rulefx {

struct Candle {
    std::int64_t timestamp = 0;  // UTC epoch seconds
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;

    // low <= min(open, close), high >= max(open, close), all prices > 0
    bool valid() const;
};

// Column-oriented OHLC history. All columns share one time axis; timestamps
// are strictly increasing and equally spaced except across session gaps
// (anything wider than twice the bar interval is treated as a gap).
struct CandleSeries {
    std::string pair;
    std::int64_t bar_interval = 0;  // seconds; 0 = unknown
    Eigen::ArrayX<std::int64_t> timestamp;
    Eigen::ArrayXd open;
    Eigen::ArrayXd high;
    Eigen::ArrayXd low;
    Eigen::ArrayXd close;

    Eigen::Index size() const { return close.size(); }
    Candle bar(Eigen::Index i) const {
        return Candle{timestamp[i], open[i], high[i], low[i], close[i]};
    }
};

struct SplitSpec {
    double train_fraction = 0.5;  // chronological split, never shuffled
};

enum class Regime { TrendUp, TrendDown, MeanRevert, RandomWalk };

struct SynthOptions {
    std::string pair = "SYNUSD";
    double start_price = 1.2;
    double drift = 4.0e-4;       // per-bar log drift for the trend regimes
    double volatility = 1.2e-3;  // per-bar log-return stddev
    double reversion = 0.05;     // pull strength toward the anchor (mean-revert)
    double range_frac = 0.5;     // high/low extension relative to volatility
    std::int64_t bar_interval = 300;
    std::int64_t start_timestamp = 1514764800;  // 2018-01-01 00:00 UTC
};

// Strict loader: throws on the first malformed row, non-increasing timestamp,
// or candle-invariant violation. bar_interval 0 infers the interval as the
// smallest observed timestamp delta.
CandleSeries load_csv(const std::string& path, const std::string& pair,
                      std::int64_t bar_interval = 0);

void write_csv(const CandleSeries& series, const std::string& path);

// Lenient one-pass scan used by the ingest command: counts problems instead
// of throwing on the first one.
struct ScanReport {
    long rows = 0;       // data rows seen (excluding header)
    long bars = 0;       // rows that passed every check
    long malformed = 0;
    long non_monotonic = 0;
    long invariant_violations = 0;
    long spacing_violations = 0;
    long session_gaps = 0;
    std::int64_t inferred_interval = 0;
    std::vector<std::string> issues;  // first few problems, human readable

    bool clean() const {
        return malformed == 0 && non_monotonic == 0 && invariant_violations == 0 &&
               spacing_violations == 0;
    }
};

ScanReport scan_csv(const std::string& path, std::int64_t bar_interval = 0);

// Chronological partition: first segment gets floor(train_fraction * N) bars.
std::pair<CandleSeries, CandleSeries> split(const CandleSeries& series, const SplitSpec& spec);

// Seeded geometric random walk on the close with regime-dependent drift.
// open follows the previous close; high/low wrap the body with multiplicative
// noise so the candle invariants hold by construction. Bit-reproducible for a
// fixed seed.
CandleSeries synthesize(std::uint64_t seed, Eigen::Index n, Regime regime,
                        const SynthOptions& opts = {});

}  // namespace rulefx
