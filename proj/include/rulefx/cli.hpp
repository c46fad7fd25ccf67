#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rulefx/backtest.hpp"
#include "rulefx/config.hpp"

namespace rulefx {

// Command-line overrides layered on top of the config file.
struct CliOptions {
    std::string config_path;
    std::string pair;  // restrict to one configured pair
    bool seed_set = false;
    std::uint64_t seed = 0;
    std::vector<double> leverages;
    std::string out_dir;
};

// Artifact filenames inside <out>/<pair>/.
inline constexpr const char* kGridResultsFile = "grid_results.csv";
inline constexpr const char* kBestParamsFile = "best_params.txt";
std::string chromosome_file(FitnessKind kind);  // chromosome_<kind>.txt
std::string trace_file(FitnessKind kind);       // trace_<kind>.csv
std::string comparison_file_csv(double leverage);
std::string comparison_file_text(double leverage);
std::string equity_file(const std::string& strategy_name, double leverage);

// What a training run leaves behind for one pair.
struct PairArtifacts {
    std::vector<RuleParams> params;  // tuned parameters, aligned with the catalog
    TrainedWeights mr;               // weights evolved for mean return
    TrainedWeights mssr;             // weights evolved for ssr
};

PairArtifacts read_pair_artifacts(const std::string& dir, const std::vector<RuleSpec>& catalog);

// Loads the config file and applies the command-line overrides.
RunConfig resolve_config(const CliOptions& opt);

int cmd_ingest(const RunConfig& cfg, std::ostream& out);
int cmd_optimize(const RunConfig& cfg, std::ostream& out);
int cmd_backtest(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

// Parses argv and dispatches. Exit codes: 0 success, 2 bad data/config/usage,
// 3 missing optimization artifacts, 4 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rulefx
