#include "rulefx/candles.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "rulefx/rng.hpp"

namespace rulefx {

namespace {

constexpr const char* kHeader = "timestamp,open,high,low,close";

struct ParsedRow {
    std::int64_t timestamp;
    double px[4];  // open, high, low, close
};

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool parse_i64(std::string_view s, std::int64_t& out) {
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && p == end;
}

bool parse_f64(std::string_view s, double& out) {
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && p == end && std::isfinite(out);
}

// Splits on commas into exactly five fields; returns false on any parse issue.
bool parse_row(const std::string& line, ParsedRow& row, std::string& why) {
    std::string_view rest = line;
    std::string_view field[5];
    for (int i = 0; i < 5; ++i) {
        const auto comma = rest.find(',');
        if (i < 4) {
            if (comma == std::string_view::npos) {
                why = "expected 5 fields";
                return false;
            }
            field[i] = rest.substr(0, comma);
            rest = rest.substr(comma + 1);
        } else {
            if (comma != std::string_view::npos) {
                why = "expected 5 fields";
                return false;
            }
            field[i] = rest;
        }
    }
    if (!parse_i64(field[0], row.timestamp)) {
        why = "bad timestamp '" + std::string(field[0]) + "'";
        return false;
    }
    static constexpr const char* kName[4] = {"open", "high", "low", "close"};
    for (int i = 0; i < 4; ++i) {
        if (!parse_f64(field[i + 1], row.px[i])) {
            why = std::string("bad ") + kName[i] + " '" + std::string(field[i + 1]) + "'";
            return false;
        }
    }
    return true;
}

std::string invariant_issue(const ParsedRow& r) {
    const double o = r.px[0], h = r.px[1], l = r.px[2], c = r.px[3];
    if (o <= 0.0 || h <= 0.0 || l <= 0.0 || c <= 0.0) return "non-positive price";
    if (l > std::min(o, c)) return "low above min(open, close)";
    if (h < std::max(o, c)) return "high below max(open, close)";
    return {};
}

std::int64_t infer_interval(const std::vector<ParsedRow>& rows) {
    std::int64_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::int64_t dt = rows[i].timestamp - rows[i - 1].timestamp;
        if (dt > 0 && (best == 0 || dt < best)) best = dt;
    }
    return best;
}

CandleSeries from_rows(const std::vector<ParsedRow>& rows, const std::string& pair,
                       std::int64_t interval) {
    CandleSeries s;
    s.pair = pair;
    s.bar_interval = interval;
    const auto n = static_cast<Eigen::Index>(rows.size());
    s.timestamp.resize(n);
    s.open.resize(n);
    s.high.resize(n);
    s.low.resize(n);
    s.close.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        s.timestamp[i] = r.timestamp;
        s.open[i] = r.px[0];
        s.high[i] = r.px[1];
        s.low[i] = r.px[2];
        s.close[i] = r.px[3];
    }
    return s;
}

}  // namespace

bool Candle::valid() const {
    if (open <= 0.0 || high <= 0.0 || low <= 0.0 || close <= 0.0) return false;
    if (low > std::min(open, close)) return false;
    if (high < std::max(open, close)) return false;
    return true;
}

CandleSeries load_csv(const std::string& path, const std::string& pair,
                      std::int64_t bar_interval) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);

    std::string line;
    if (!std::getline(in, line)) throw MalformedRow(1, "empty file");
    strip_cr(line);
    if (line != kHeader) throw MalformedRow(1, "header must be '" + std::string(kHeader) + "'");

    std::vector<ParsedRow> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        ParsedRow row;
        std::string why;
        if (!parse_row(line, row, why)) throw MalformedRow(lineno, why);
        if (const auto issue = invariant_issue(row); !issue.empty())
            throw InvariantViolation(lineno, issue);
        if (!rows.empty() && row.timestamp <= rows.back().timestamp)
            throw NonMonotonicTimestamp(lineno);
        rows.push_back(row);
    }

    const std::int64_t interval = bar_interval > 0 ? bar_interval : infer_interval(rows);
    if (interval > 0) {
        // Spacing must match the interval bar to bar; wider than twice the
        // interval counts as a session gap and is allowed.
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const std::int64_t dt = rows[i].timestamp - rows[i - 1].timestamp;
            if (dt != interval && dt <= 2 * interval)
                throw InvariantViolation(static_cast<long>(i) + 2,
                                         "irregular bar spacing of " + std::to_string(dt) + "s");
        }
    }
    return from_rows(rows, pair, interval);
}

void write_csv(const CandleSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << kHeader << '\n';
    char buf[160];
    for (Eigen::Index i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.6f,%.6f\n",
                      static_cast<long long>(series.timestamp[i]), series.open[i], series.high[i],
                      series.low[i], series.close[i]);
        out << buf;
    }
}

ScanReport scan_csv(const std::string& path, std::int64_t bar_interval) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);

    ScanReport rep;
    auto note = [&rep](long line, const std::string& what) {
        if (rep.issues.size() < 10)
            rep.issues.push_back("line " + std::to_string(line) + ": " + what);
    };

    std::string line;
    if (!std::getline(in, line)) {
        ++rep.malformed;
        note(1, "empty file");
        return rep;
    }
    strip_cr(line);
    if (line != kHeader) {
        ++rep.malformed;
        note(1, "bad header");
        return rep;
    }

    std::vector<ParsedRow> good;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        ++rep.rows;
        ParsedRow row;
        std::string why;
        if (!parse_row(line, row, why)) {
            ++rep.malformed;
            note(lineno, why);
            continue;
        }
        if (const auto issue = invariant_issue(row); !issue.empty()) {
            ++rep.invariant_violations;
            note(lineno, issue);
            continue;
        }
        if (!good.empty() && row.timestamp <= good.back().timestamp) {
            ++rep.non_monotonic;
            note(lineno, "timestamp not increasing");
            continue;
        }
        good.push_back(row);
    }
    rep.bars = static_cast<long>(good.size());
    rep.inferred_interval = bar_interval > 0 ? bar_interval : infer_interval(good);
    if (rep.inferred_interval > 0) {
        for (std::size_t i = 1; i < good.size(); ++i) {
            const std::int64_t dt = good[i].timestamp - good[i - 1].timestamp;
            if (dt == rep.inferred_interval) continue;
            if (dt > 2 * rep.inferred_interval) {
                ++rep.session_gaps;
            } else {
                ++rep.spacing_violations;
            }
        }
    }
    return rep;
}

std::pair<CandleSeries, CandleSeries> split(const CandleSeries& series, const SplitSpec& spec) {
    const Eigen::Index n = series.size();
    if (n < 2) throw SeriesTooShort("need at least 2 bars to split, got " + std::to_string(n));

    const auto n_train = static_cast<Eigen::Index>(
        std::floor(spec.train_fraction * static_cast<double>(n)));
    auto take = [&series](Eigen::Index start, Eigen::Index count) {
        CandleSeries out;
        out.pair = series.pair;
        out.bar_interval = series.bar_interval;
        out.timestamp = series.timestamp.segment(start, count);
        out.open = series.open.segment(start, count);
        out.high = series.high.segment(start, count);
        out.low = series.low.segment(start, count);
        out.close = series.close.segment(start, count);
        return out;
    };
    return {take(0, n_train), take(n_train, n - n_train)};
}

CandleSeries synthesize(std::uint64_t seed, Eigen::Index n, Regime regime,
                        const SynthOptions& opts) {
    if (n < 1) throw SeriesTooShort("synthesize needs n >= 1");

    CandleSeries s;
    s.pair = opts.pair;
    s.bar_interval = opts.bar_interval;
    s.timestamp.resize(n);
    s.open.resize(n);
    s.high.resize(n);
    s.low.resize(n);
    s.close.resize(n);

    Xoshiro256 rng(seed);
    const double anchor = std::log(opts.start_price);
    double log_close = anchor;

    s.timestamp[0] = opts.start_timestamp;
    s.open[0] = opts.start_price;
    s.high[0] = opts.start_price;
    s.low[0] = opts.start_price;
    s.close[0] = opts.start_price;

    for (Eigen::Index t = 1; t < n; ++t) {
        double mu = 0.0;
        switch (regime) {
            case Regime::TrendUp: mu = opts.drift; break;
            case Regime::TrendDown: mu = -opts.drift; break;
            case Regime::MeanRevert: mu = -opts.reversion * (log_close - anchor); break;
            case Regime::RandomWalk: mu = 0.0; break;
        }
        log_close += mu + opts.volatility * rng.gaussian();
        const double close = std::exp(log_close);
        const double open = s.close[t - 1];
        const double body_hi = std::max(open, close);
        const double body_lo = std::min(open, close);
        const double wick_hi = opts.range_frac * opts.volatility * std::abs(rng.gaussian());
        const double wick_lo = opts.range_frac * opts.volatility * std::abs(rng.gaussian());

        s.timestamp[t] = opts.start_timestamp + t * opts.bar_interval;
        s.open[t] = open;
        s.close[t] = close;
        s.high[t] = body_hi * (1.0 + wick_hi);
        s.low[t] = body_lo * std::max(1.0 - wick_lo, 0.5);
    }
    return s;
}

}  // namespace rulefx
