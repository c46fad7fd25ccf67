#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "rulefx/candles.hpp"
#include "rulefx/errors.hpp"
#include "rulefx/indicators.hpp"

namespace rulefx {

// Ternary trading signal per bar: +1 long, -1 short, 0 flat/undecided.
using SignalSeries = Eigen::ArrayXi;

// One column per rule, aligned with the candle series row-for-row.
using SignalMatrix = Eigen::MatrixXi;

// How many rule columns a feature matrix carries.
inline constexpr Eigen::Index kFeatureCount = 16;

// ---------------------------------------------------------------------------
// Signal compilers. Each turns indicator lines into a ternary series of the
// same length. Entries where any input is NaN are 0.
// ---------------------------------------------------------------------------

// Two-line crossover with carry: +1 while a > b, -1 while a < b; on equality
// the last emitted state persists (0 before the first strict inequality).
SignalSeries signal_crossover(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);

// Line-versus-constant threshold, same carry semantics as signal_crossover.
SignalSeries signal_threshold(const Eigen::ArrayXd& a, double threshold);

// Stateless band exit on a bounded oscillator: -1 above hi, +1 below lo,
// else 0. Requires hi > lo.
SignalSeries signal_band(const Eigen::ArrayXd& a, double hi, double lo);

// Stateless price-versus-channel: +1 above the upper band, -1 below the
// lower, else 0. Requires upper >= lower wherever both are defined.
SignalSeries signal_channel(const Eigen::ArrayXd& a, const Eigen::ArrayXd& upper,
                            const Eigen::ArrayXd& lower);

// ---------------------------------------------------------------------------
// Rule catalog.
// ---------------------------------------------------------------------------

enum class RuleKind {
    CloseXSma,
    SmaXSma,
    CloseXEma,
    EmaXEma,
    CloseXDema,
    CloseXTema,
    StochKXD,
    VortexCross,
    RsiThreshold,
    StochThreshold,
    RsiBand,
    StochBand,
    CloseXBollinger,
    CloseXKeltner,
    CloseXIchimoku,
    SmaXBollinger,
};

const char* to_string(RuleKind kind);
RuleKind rule_kind_from_string(const std::string& name);

// Which of the four signal compilers a kind uses (1 crossover, 2 threshold,
// 3 band, 4 channel).
int rule_category(RuleKind kind);

// Ordered name -> value parameter set. Order is the declaration order of the
// rule's parameters and is what tie-breaking and serialization use.
class RuleParams {
public:
    RuleParams() = default;
    RuleParams(std::initializer_list<std::pair<std::string, double>> kv);

    bool has(const std::string& name) const;
    double get(const std::string& name) const;  // ConfigError if absent
    // get() rounded to the nearest integer; rejects non-integral or < 1.
    Eigen::Index get_window(const std::string& name) const;
    void set(const std::string& name, double value);  // inserts or overwrites

    const std::vector<std::pair<std::string, double>>& items() const { return entries_; }
    std::string to_string() const;  // "name=value name=value"

private:
    std::vector<std::pair<std::string, double>> entries_;
};

bool operator==(const RuleParams& a, const RuleParams& b);

// One axis of a parameter grid: the candidate values for a named parameter,
// in the order they will be enumerated.
struct ParamRange {
    std::string name;
    std::vector<double> values;
};

std::vector<double> int_range(int lo, int hi, int step = 1);

struct RuleSpec {
    std::string id;
    RuleKind kind;
    RuleParams defaults;
    std::vector<ParamRange> grid;  // cartesian product, declared order

    int category() const { return rule_category(kind); }
};

// Whether a concrete parameter assignment satisfies the kind's ordering
// constraints (fast < slow, hi > lo, tenkan <= kijun <= senkou_b).
bool params_valid(RuleKind kind, const RuleParams& params);

// The sixteen-rule default catalog, covering all four signal categories, each
// entry with the search grid its parameters are tuned over. Ids equal the
// kind names.
std::vector<RuleSpec> default_catalog();

// Evaluates one rule on a candle series with the given parameters.
SignalSeries evaluate_rule(const RuleSpec& rule, const CandleSeries& candles,
                           const RuleParams& params);

// Evaluates the whole catalog into an N x 16 signal matrix; params[i] are the
// parameters for catalog[i].
SignalMatrix build_features(const CandleSeries& candles, const std::vector<RuleSpec>& catalog,
                            const std::vector<RuleParams>& params);

}  // namespace rulefx
