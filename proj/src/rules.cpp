#include "rulefx/rules.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace rulefx {

SignalSeries signal_crossover(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
    if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
    SignalSeries s = SignalSeries::Zero(a.size());
    int state = 0;
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (std::isnan(a[t]) || std::isnan(b[t])) continue;  // stay flat, keep no state
        if (a[t] > b[t])
            state = 1;
        else if (a[t] < b[t])
            state = -1;
        s[t] = state;  // on a tie the previous state persists
    }
    return s;
}

SignalSeries signal_threshold(const Eigen::ArrayXd& a, double threshold) {
    SignalSeries s = SignalSeries::Zero(a.size());
    int state = 0;
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (std::isnan(a[t])) continue;
        if (a[t] > threshold)
            state = 1;
        else if (a[t] < threshold)
            state = -1;
        s[t] = state;
    }
    return s;
}

SignalSeries signal_band(const Eigen::ArrayXd& a, double hi, double lo) {
    if (!(hi > lo)) throw ThresholdOrderViolation(hi, lo);
    SignalSeries s = SignalSeries::Zero(a.size());
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (std::isnan(a[t])) continue;
        if (a[t] > hi)
            s[t] = -1;  // overbought: fade the move
        else if (a[t] < lo)
            s[t] = 1;
    }
    return s;
}

SignalSeries signal_channel(const Eigen::ArrayXd& a, const Eigen::ArrayXd& upper,
                            const Eigen::ArrayXd& lower) {
    if (a.size() != upper.size()) throw LengthMismatch(a.size(), upper.size());
    if (a.size() != lower.size()) throw LengthMismatch(a.size(), lower.size());
    SignalSeries s = SignalSeries::Zero(a.size());
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (std::isnan(upper[t]) || std::isnan(lower[t])) continue;
        if (upper[t] < lower[t]) throw BandOrderViolation(t);
        if (std::isnan(a[t])) continue;
        if (a[t] > upper[t])
            s[t] = 1;  // breakout: follow the move
        else if (a[t] < lower[t])
            s[t] = -1;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Rule kinds.
// ---------------------------------------------------------------------------

namespace {

struct KindName {
    RuleKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {RuleKind::CloseXSma, "close_x_sma"},
    {RuleKind::SmaXSma, "sma_x_sma"},
    {RuleKind::CloseXEma, "close_x_ema"},
    {RuleKind::EmaXEma, "ema_x_ema"},
    {RuleKind::CloseXDema, "close_x_dema"},
    {RuleKind::CloseXTema, "close_x_tema"},
    {RuleKind::StochKXD, "stoch_k_x_d"},
    {RuleKind::VortexCross, "vortex_cross"},
    {RuleKind::RsiThreshold, "rsi_threshold"},
    {RuleKind::StochThreshold, "stoch_threshold"},
    {RuleKind::RsiBand, "rsi_band"},
    {RuleKind::StochBand, "stoch_band"},
    {RuleKind::CloseXBollinger, "close_x_bollinger"},
    {RuleKind::CloseXKeltner, "close_x_keltner"},
    {RuleKind::CloseXIchimoku, "close_x_ichimoku"},
    {RuleKind::SmaXBollinger, "sma_x_bollinger"},
};

}  // namespace

const char* to_string(RuleKind kind) {
    for (const auto& kn : kKindNames)
        if (kn.kind == kind) return kn.name;
    throw Error("unknown rule kind");
}

RuleKind rule_kind_from_string(const std::string& name) {
    for (const auto& kn : kKindNames)
        if (name == kn.name) return kn.kind;
    throw ConfigError("unknown rule kind '" + name + "'");
}

int rule_category(RuleKind kind) {
    switch (kind) {
        case RuleKind::CloseXSma:
        case RuleKind::SmaXSma:
        case RuleKind::CloseXEma:
        case RuleKind::EmaXEma:
        case RuleKind::CloseXDema:
        case RuleKind::CloseXTema:
        case RuleKind::StochKXD:
        case RuleKind::VortexCross:
            return 1;
        case RuleKind::RsiThreshold:
        case RuleKind::StochThreshold:
            return 2;
        case RuleKind::RsiBand:
        case RuleKind::StochBand:
            return 3;
        case RuleKind::CloseXBollinger:
        case RuleKind::CloseXKeltner:
        case RuleKind::CloseXIchimoku:
        case RuleKind::SmaXBollinger:
            return 4;
    }
    throw Error("unknown rule kind");
}

// ---------------------------------------------------------------------------
// RuleParams.
// ---------------------------------------------------------------------------

RuleParams::RuleParams(std::initializer_list<std::pair<std::string, double>> kv) {
    for (const auto& [name, value] : kv) set(name, value);
}

bool RuleParams::has(const std::string& name) const {
    for (const auto& [k, v] : entries_)
        if (k == name) return true;
    return false;
}

double RuleParams::get(const std::string& name) const {
    for (const auto& [k, v] : entries_)
        if (k == name) return v;
    throw ConfigError("missing rule parameter '" + name + "'");
}

Eigen::Index RuleParams::get_window(const std::string& name) const {
    const double v = get(name);
    const auto r = std::llround(v);
    if (std::abs(v - static_cast<double>(r)) > 1e-9)
        throw ConfigError("parameter '" + name + "' must be an integer, got " + std::to_string(v));
    if (r < 1) throw ConfigError("parameter '" + name + "' must be >= 1");
    return static_cast<Eigen::Index>(r);
}

void RuleParams::set(const std::string& name, double value) {
    for (auto& [k, v] : entries_) {
        if (k == name) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(name, value);
}

std::string RuleParams::to_string() const {
    std::string out;
    char buf[64];
    for (const auto& [k, v] : entries_) {
        if (!out.empty()) out += ' ';
        if (v == std::floor(v) && std::abs(v) < 1e15)
            std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        else
            std::snprintf(buf, sizeof buf, "%.17g", v);
        out += k;
        out += '=';
        out += buf;
    }
    return out;
}

bool operator==(const RuleParams& a, const RuleParams& b) {
    return a.items() == b.items();
}

std::vector<double> int_range(int lo, int hi, int step) {
    std::vector<double> out;
    for (int v = lo; v <= hi; v += step) out.push_back(static_cast<double>(v));
    return out;
}

bool params_valid(RuleKind kind, const RuleParams& params) {
    switch (kind) {
        case RuleKind::SmaXSma:
        case RuleKind::EmaXEma:
            return params.get("fast") < params.get("slow");
        case RuleKind::RsiBand:
        case RuleKind::StochBand:
            return params.get("hi") > params.get("lo");
        case RuleKind::CloseXIchimoku: {
            const double t = params.get("tenkan");
            const double k = params.get("kijun");
            return t <= k && k <= params.get("senkou_b");
        }
        default:
            return true;
    }
}

// ---------------------------------------------------------------------------
// Default catalog.
// ---------------------------------------------------------------------------

std::vector<RuleSpec> default_catalog() {
    const std::vector<double> widths = {1.0, 1.5, 2.0, 2.5, 3.0};
    std::vector<RuleSpec> rules;
    rules.reserve(kFeatureCount);

    auto add = [&rules](RuleKind kind, RuleParams defaults, std::vector<ParamRange> grid) {
        rules.push_back(RuleSpec{to_string(kind), kind, std::move(defaults), std::move(grid)});
    };

    // Category 1: two-line crossovers.
    add(RuleKind::CloseXSma, {{"window", 20}}, {{"window", int_range(1, 100)}});
    add(RuleKind::SmaXSma, {{"fast", 10}, {"slow", 50}},
        {{"fast", int_range(1, 100)}, {"slow", int_range(1, 100)}});
    add(RuleKind::CloseXEma, {{"window", 20}}, {{"window", int_range(1, 100)}});
    add(RuleKind::EmaXEma, {{"fast", 10}, {"slow", 50}},
        {{"fast", int_range(1, 100)}, {"slow", int_range(1, 100)}});
    add(RuleKind::CloseXDema, {{"window", 20}}, {{"window", int_range(1, 100)}});
    add(RuleKind::CloseXTema, {{"window", 20}}, {{"window", int_range(1, 100)}});
    add(RuleKind::StochKXD, {{"k_window", 14}, {"d_window", 3}},
        {{"k_window", int_range(1, 100)}, {"d_window", int_range(1, 100)}});
    add(RuleKind::VortexCross, {{"window", 14}}, {{"window", int_range(1, 100)}});

    // Category 2: oscillator-versus-threshold.
    add(RuleKind::RsiThreshold, {{"window", 14}, {"threshold", 50}},
        {{"window", int_range(1, 100)}, {"threshold", int_range(5, 95, 5)}});
    add(RuleKind::StochThreshold, {{"k_window", 14}, {"threshold", 50}},
        {{"k_window", int_range(1, 100)}, {"threshold", int_range(5, 95, 5)}});

    // Category 3: oscillator band exits.
    add(RuleKind::RsiBand, {{"window", 14}, {"hi", 70}, {"lo", 30}},
        {{"window", int_range(1, 100)},
         {"hi", int_range(50, 95, 5)},
         {"lo", int_range(5, 50, 5)}});
    add(RuleKind::StochBand, {{"k_window", 14}, {"hi", 80}, {"lo", 20}},
        {{"k_window", int_range(1, 100)},
         {"hi", int_range(60, 95, 5)},
         {"lo", int_range(5, 40, 5)}});

    // Category 4: price-versus-channel breakouts.
    add(RuleKind::CloseXBollinger, {{"window", 20}, {"width", 2}},
        {{"window", int_range(2, 100)}, {"width", widths}});
    add(RuleKind::CloseXKeltner, {{"window", 20}, {"width", 2}},
        {{"window", int_range(1, 100)}, {"width", widths}});
    add(RuleKind::CloseXIchimoku, {{"tenkan", 9}, {"kijun", 26}, {"senkou_b", 52}},
        {{"tenkan", {3, 6, 9, 12, 15, 18}},
         {"kijun", {13, 20, 26, 34, 42, 52}},
         {"senkou_b", {26, 39, 52, 65, 78, 91}}});
    add(RuleKind::SmaXBollinger, {{"sma_window", 5}, {"window", 20}, {"width", 2}},
        {{"sma_window", int_range(1, 20)},
         {"window", {10, 15, 20, 30, 40, 50}},
         {"width", widths}});

    return rules;
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

namespace {

// Elementwise cloud envelope of the two senkou lines; NaN where either is.
void cloud_bounds(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b, Eigen::ArrayXd& upper,
                  Eigen::ArrayXd& lower) {
    upper = Eigen::ArrayXd::Constant(a.size(), detail::kNaN);
    lower = upper;
    for (Eigen::Index t = 0; t < a.size(); ++t) {
        if (std::isnan(a[t]) || std::isnan(b[t])) continue;
        upper[t] = std::max(a[t], b[t]);
        lower[t] = std::min(a[t], b[t]);
    }
}

}  // namespace

SignalSeries evaluate_rule(const RuleSpec& rule, const CandleSeries& candles,
                           const RuleParams& p) {
    const Eigen::ArrayXd& close = candles.close;
    switch (rule.kind) {
        case RuleKind::CloseXSma:
            return signal_crossover(close,
                                    moving_average(close, p.get_window("window"), MaKind::Sma).values);
        case RuleKind::SmaXSma: {
            const Eigen::Index fast = p.get_window("fast");
            const Eigen::Index slow = p.get_window("slow");
            if (fast >= slow) throw InvalidWindowOrder("fast window must be smaller than slow");
            return signal_crossover(moving_average(close, fast, MaKind::Sma).values,
                                    moving_average(close, slow, MaKind::Sma).values);
        }
        case RuleKind::CloseXEma:
            return signal_crossover(close,
                                    moving_average(close, p.get_window("window"), MaKind::Ema).values);
        case RuleKind::EmaXEma: {
            const Eigen::Index fast = p.get_window("fast");
            const Eigen::Index slow = p.get_window("slow");
            if (fast >= slow) throw InvalidWindowOrder("fast window must be smaller than slow");
            return signal_crossover(moving_average(close, fast, MaKind::Ema).values,
                                    moving_average(close, slow, MaKind::Ema).values);
        }
        case RuleKind::CloseXDema:
            return signal_crossover(close,
                                    moving_average(close, p.get_window("window"), MaKind::Dema).values);
        case RuleKind::CloseXTema:
            return signal_crossover(close,
                                    moving_average(close, p.get_window("window"), MaKind::Tema).values);
        case RuleKind::StochKXD: {
            const auto st = stochastic(candles, p.get_window("k_window"), p.get_window("d_window"));
            return signal_crossover(st.percent_k.values, st.percent_d.values);
        }
        case RuleKind::VortexCross: {
            const auto vx = vortex(candles, p.get_window("window"));
            return signal_crossover(vx.plus.values, vx.minus.values);
        }
        case RuleKind::RsiThreshold:
            return signal_threshold(rsi(close, p.get_window("window")).values, p.get("threshold"));
        case RuleKind::StochThreshold:
            return signal_threshold(stochastic(candles, p.get_window("k_window"), 1).percent_k.values,
                                    p.get("threshold"));
        case RuleKind::RsiBand:
            return signal_band(rsi(close, p.get_window("window")).values, p.get("hi"), p.get("lo"));
        case RuleKind::StochBand:
            return signal_band(stochastic(candles, p.get_window("k_window"), 1).percent_k.values,
                               p.get("hi"), p.get("lo"));
        case RuleKind::CloseXBollinger: {
            const auto bands = bollinger(close, p.get_window("window"), p.get("width"));
            return signal_channel(close, bands.upper.values, bands.lower.values);
        }
        case RuleKind::CloseXKeltner: {
            const auto bands = keltner(candles, p.get_window("window"), p.get("width"));
            return signal_channel(close, bands.upper.values, bands.lower.values);
        }
        case RuleKind::CloseXIchimoku: {
            const auto cloud = ichimoku(candles, p.get_window("tenkan"), p.get_window("kijun"),
                                        p.get_window("senkou_b"));
            Eigen::ArrayXd upper, lower;
            cloud_bounds(cloud.senkou_a.values, cloud.senkou_b.values, upper, lower);
            return signal_channel(close, upper, lower);
        }
        case RuleKind::SmaXBollinger: {
            const auto bands = bollinger(close, p.get_window("window"), p.get("width"));
            const auto line = moving_average(close, p.get_window("sma_window"), MaKind::Sma);
            return signal_channel(line.values, bands.upper.values, bands.lower.values);
        }
    }
    throw Error("unknown rule kind");
}

SignalMatrix build_features(const CandleSeries& candles, const std::vector<RuleSpec>& catalog,
                            const std::vector<RuleParams>& params) {
    if (catalog.size() != params.size())
        throw Error("catalog and parameter counts differ: " + std::to_string(catalog.size()) +
                    " vs " + std::to_string(params.size()));
    if (static_cast<Eigen::Index>(catalog.size()) != kFeatureCount)
        throw Error("feature matrix requires exactly " + std::to_string(kFeatureCount) +
                    " rules, got " + std::to_string(catalog.size()));

    SignalMatrix features(candles.size(), kFeatureCount);
    for (std::size_t i = 0; i < catalog.size(); ++i)
        features.col(static_cast<Eigen::Index>(i)) =
            evaluate_rule(catalog[i], candles, params[i]).matrix();
    return features;
}

}  // namespace rulefx
