#include "rulefx/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

namespace fs = std::filesystem;

namespace rulefx {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Integers print bare so parameter files stay readable; anything else gets
// full round-trip precision.
std::string fmt_param(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    return fmt("%.17g", v);
}

std::string slugify(const std::string& name) {
    std::string s;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if ((c == '-' || c == '_' || c == ' ') && !s.empty() && s.back() != '_')
            s += '_';
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

FitnessKind fitness_kind_from_string(const std::string& name) {
    if (name == "mr") return FitnessKind::MeanReturn;
    if (name == "mssr") return FitnessKind::Ssr;
    throw ConfigError("unknown fitness kind '" + name + "'");
}

std::string join_g17(const Chromosome& w) {
    std::string out;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (i) out += ',';
        out += fmt("%.17g", w[i]);
    }
    return out;
}

}  // namespace

std::string chromosome_file(FitnessKind kind) {
    return std::string("chromosome_") + to_string(kind) + ".txt";
}

std::string trace_file(FitnessKind kind) {
    return std::string("trace_") + to_string(kind) + ".csv";
}

std::string comparison_file_csv(double leverage) {
    return "comparison_L" + fmt("%g", leverage) + ".csv";
}

std::string comparison_file_text(double leverage) {
    return "comparison_L" + fmt("%g", leverage) + ".txt";
}

std::string equity_file(const std::string& strategy_name, double leverage) {
    return "equity_" + slugify(strategy_name) + "_L" + fmt("%g", leverage) + ".csv";
}

RunConfig resolve_config(const CliOptions& opt) {
    RunConfig cfg = RunConfig::from_file(opt.config_path);
    if (opt.seed_set) {
        cfg.ga.seed = opt.seed;
        cfg.seed_set = true;
    }
    if (!opt.leverages.empty()) cfg.leverages = opt.leverages;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (!opt.pair.empty()) {
        std::vector<std::pair<std::string, std::string>> keep;
        for (const auto& entry : cfg.data)
            if (entry.first == opt.pair) keep.push_back(entry);
        if (keep.empty())
            throw ConfigError("pair '" + opt.pair + "' is not configured under data.*");
        cfg.data = std::move(keep);
    }
    if (cfg.data.empty()) throw ConfigError("config has no data.<PAIR> entries");
    return cfg;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
    int rc = 0;
    for (const auto& [pair, path] : cfg.data) {
        const ScanReport rep = scan_csv(path, cfg.bar_interval);
        out << pair << ": " << rep.rows << " rows, " << rep.bars << " clean bars, interval "
            << rep.inferred_interval << "s, " << rep.session_gaps << " session gaps\n";
        if (rep.clean() && rep.bars > 0) continue;
        rc = 2;
        out << pair << ": REJECTED (" << rep.malformed << " malformed, " << rep.non_monotonic
            << " non-monotonic, " << rep.invariant_violations << " invariant, "
            << rep.spacing_violations << " spacing)\n";
        for (const auto& issue : rep.issues) out << "  " << issue << '\n';
    }
    return rc;
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

namespace {

std::string grid_results_csv(const std::vector<RuleSpec>& catalog,
                             const std::vector<GridResult>& results) {
    std::string out = "rule_id,category,points,best_score,best_params\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        out += results[i].rule_id;
        out += ',' + std::to_string(catalog[i].category());
        out += ',' + std::to_string(results[i].evaluated.size());
        out += ',' + fmt("%.12g", results[i].best_score);
        out += ',' + results[i].best_params.to_string();
        out += '\n';
    }
    return out;
}

std::string best_params_text(const std::string& pair, Eigen::Index train_bars,
                             const std::vector<RuleSpec>& catalog,
                             const std::vector<GridResult>& results) {
    KeyValueFile kv;
    kv.set("pair", pair);
    kv.set("train_bars", std::to_string(train_bars));
    for (std::size_t i = 0; i < results.size(); ++i)
        for (const auto& [name, value] : results[i].best_params.items())
            kv.set("rule." + catalog[i].id + "." + name, fmt_param(value));
    return kv.serialize();
}

std::string chromosome_text(const std::string& pair, const TrainedWeights& tw) {
    KeyValueFile kv;
    kv.set("pair", pair);
    kv.set("fitness_kind", to_string(tw.kind));
    kv.set("seed", std::to_string(tw.seed));
    kv.set("genes", std::to_string(tw.weights.size()));
    kv.set("scale", fmt("%.17g", tw.scale));
    kv.set("fitness", fmt("%.17g", tw.fitness));
    kv.set("weights", join_g17(tw.weights));
    return kv.serialize();
}

std::string trace_csv(const FitnessTrace& trace) {
    std::string out = "generation,best_fitness,mean_fitness\n";
    for (std::size_t g = 0; g < trace.generations.size(); ++g) {
        out += std::to_string(g);
        out += ',' + fmt("%.12g", trace.generations[g].best_fitness);
        out += ',' + fmt("%.12g", trace.generations[g].mean_fitness);
        out += '\n';
    }
    return out;
}

}  // namespace

int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.seed_set)
        throw ConfigError("optimize needs a seed (--seed or 'seed =' in the config)");
    for (const auto& [pair, path] : cfg.data) {
        const CandleSeries series = load_csv(path, pair, cfg.bar_interval);
        const auto [train, test] = split(series, cfg.split);
        out << pair << ": " << train.size() << " train bars / " << test.size()
            << " test bars, tuning " << cfg.catalog.size() << " rule grids\n";

        const std::vector<GridResult> grid = optimize_catalog(cfg.catalog, train);
        std::vector<RuleParams> params;
        params.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            params.push_back(grid[i].best_params);
            out << "  " << grid[i].rule_id << ": " << grid[i].best_params.to_string()
                << "  (score " << fmt("%.6g", grid[i].best_score) << ", "
                << grid[i].evaluated.size() << " points)\n";
        }

        const SignalMatrix features = build_features(train, cfg.catalog, params);
        const ReturnSeries returns = log_returns(train);

        const fs::path dir = fs::path(cfg.out_dir) / pair;
        write_text_file((dir / kGridResultsFile).string(), grid_results_csv(cfg.catalog, grid));
        write_text_file((dir / kBestParamsFile).string(),
                        best_params_text(pair, train.size(), cfg.catalog, grid));

        for (const FitnessKind kind : {FitnessKind::MeanReturn, FitnessKind::Ssr}) {
            GAConfig ga = cfg.ga;
            ga.fitness = kind;
            const auto [weights, trace] = ga_evolve(features, returns, ga);
            TrainedWeights tw;
            tw.weights = weights;
            tw.scale = position_scale(weights, features);
            tw.kind = kind;
            tw.seed = ga.seed;
            tw.fitness = trace.generations.front().best_fitness;
            for (const auto& gen : trace.generations)
                tw.fitness = std::max(tw.fitness, gen.best_fitness);
            write_text_file((dir / chromosome_file(kind)).string(), chromosome_text(pair, tw));
            write_text_file((dir / trace_file(kind)).string(), trace_csv(trace));
            out << "  evolved " << to_string(kind) << " weights over "
                << trace.generations.size() - 1 << " generations, fitness "
                << fmt("%.6g", tw.fitness) << '\n';
        }
        out << "  artifacts in " << dir.string() << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------
// backtest
// ---------------------------------------------------------------------------

PairArtifacts read_pair_artifacts(const std::string& dir, const std::vector<RuleSpec>& catalog) {
    const fs::path d(dir);
    for (const std::string& file :
         {std::string(kBestParamsFile), chromosome_file(FitnessKind::MeanReturn),
          chromosome_file(FitnessKind::Ssr)}) {
        if (!fs::exists(d / file)) throw MissingArtifacts((d / file).string());
    }

    PairArtifacts art;
    for (const auto& rule : catalog) art.params.push_back(rule.defaults);

    const KeyValueFile bp = KeyValueFile::load((d / kBestParamsFile).string());
    for (const auto& [key, value] : bp.entries) {
        if (key.rfind("rule.", 0) != 0) continue;
        const std::string rest = key.substr(5);
        const auto dot = rest.rfind('.');
        if (dot == std::string::npos)
            throw ConfigError("malformed parameter key '" + key + "'");
        const std::string id = rest.substr(0, dot);
        const std::string name = rest.substr(dot + 1);
        bool applied = false;
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            if (catalog[i].id != id) continue;
            if (!catalog[i].defaults.has(name))
                throw ConfigError("rule '" + id + "' has no parameter '" + name + "'");
            art.params[i].set(name, parse_double(value));
            applied = true;
            break;
        }
        if (!applied)
            throw ConfigError("tuned parameters mention unknown rule id '" + id +
                              "'; catalog and artifacts are out of step");
    }

    for (TrainedWeights* tw : {&art.mr, &art.mssr}) {
        const FitnessKind kind = tw == &art.mr ? FitnessKind::MeanReturn : FitnessKind::Ssr;
        const KeyValueFile kv = KeyValueFile::load((d / chromosome_file(kind)).string());
        tw->kind = fitness_kind_from_string(kv.require("fitness_kind"));
        if (tw->kind != kind)
            throw ConfigError("fitness kind in " + chromosome_file(kind) + " does not match its name");
        tw->seed = parse_uint(kv.require("seed"));
        tw->scale = parse_double(kv.require("scale"));
        tw->fitness = parse_double(kv.require("fitness"));
        const std::vector<double> weights = parse_number_list(kv.require("weights"));
        if (weights.size() != static_cast<std::size_t>(parse_int(kv.require("genes"))))
            throw ConfigError("gene count does not match the weights list");
        if (weights.size() != catalog.size())
            throw DimensionMismatch(static_cast<std::ptrdiff_t>(weights.size()),
                                    static_cast<std::ptrdiff_t>(catalog.size()));
        tw->weights = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                        static_cast<Eigen::Index>(weights.size()));
    }
    return art;
}

namespace {

std::string equity_csv(const EquityCurve& curve) {
    std::string out = "timestamp,balance\n";
    for (Eigen::Index t = 0; t < curve.size(); ++t) {
        out += std::to_string(curve.timestamp[t]);
        out += ',' + fmt("%.12g", curve.balance[t]);
        out += '\n';
    }
    return out;
}

}  // namespace

int cmd_backtest(const RunConfig& cfg, std::ostream& out) {
    for (const auto& [pair, path] : cfg.data) {
        const fs::path dir = fs::path(cfg.out_dir) / pair;
        const PairArtifacts art = read_pair_artifacts(dir.string(), cfg.catalog);

        const CandleSeries series = load_csv(path, pair, cfg.bar_interval);
        const auto [train, test] = split(series, cfg.split);

        const std::vector<StrategySpec> strategies = {
            buy_hold(), sell_hold(), weighted_strategy("GA-MR", art.mr),
            weighted_strategy("GA-MSSR", art.mssr)};

        for (const double leverage : cfg.leverages) {
            const ComparisonTable table =
                compare_strategies(strategies, test, cfg.catalog, art.params, leverage);
            write_text_file((dir / comparison_file_csv(leverage)).string(), table.to_csv());
            write_text_file((dir / comparison_file_text(leverage)).string(), table.to_text());
            for (const auto& row : table.rows)
                write_text_file((dir / equity_file(row.name, leverage)).string(),
                                equity_csv(row.curve));
            out << table.to_text() << '\n';
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

namespace {

ComparisonTable parse_comparison_csv(const std::string& text, const std::string& pair,
                                     double leverage) {
    ComparisonTable table;
    table.pair = pair;
    table.leverage = leverage;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("strategy,", 0) != 0)
        throw ConfigError("comparison file does not start with its header row");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream row(line);
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) throw ConfigError("comparison row needs 8 columns: '" + line + "'");
        BacktestResult r;
        r.name = cells[0];
        r.report.roi = parse_double(cells[1]);
        r.report.sharpe = parse_double(cells[2]);
        r.report.max_drawdown = parse_double(cells[3]);
        r.report.avg_position = parse_double(cells[4]);
        r.report.ssr = parse_double(cells[5]);
        r.report.total_log_return = parse_double(cells[6]);
        r.report.trading_days = parse_int(cells[7]);
        table.rows.push_back(std::move(r));
    }
    return table;
}

}  // namespace

int cmd_report(const RunConfig& cfg, std::ostream& out) {
    for (const auto& [pair, path] : cfg.data) {
        const fs::path dir = fs::path(cfg.out_dir) / pair;
        for (const double leverage : cfg.leverages) {
            const fs::path file = dir / comparison_file_csv(leverage);
            if (!fs::exists(file)) throw MissingArtifacts(file.string());
            const ComparisonTable table =
                parse_comparison_csv(read_text_file(file.string()), pair, leverage);
            out << table.to_text() << '\n';
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// argv entry point
// ---------------------------------------------------------------------------

namespace {

int exit_code_for(const Error& e) {
    if (dynamic_cast<const MissingArtifacts*>(&e)) return 3;
    if (dynamic_cast<const MissingFile*>(&e) || dynamic_cast<const MalformedRow*>(&e) ||
        dynamic_cast<const NonMonotonicTimestamp*>(&e) ||
        dynamic_cast<const InvariantViolation*>(&e) || dynamic_cast<const SeriesTooShort*>(&e) ||
        dynamic_cast<const WindowExceedsSeries*>(&e) ||
        dynamic_cast<const InvalidWindowOrder*>(&e) ||
        dynamic_cast<const ThresholdOrderViolation*>(&e) ||
        dynamic_cast<const EmptyGrid*>(&e) || dynamic_cast<const ConfigError*>(&e))
        return 2;
    return 4;  // numeric/internal failures: blown account, zero volatility, ...
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"technical-rule ensemble optimizer and backtester", "rulefx"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string leverage_spec;

    const auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "run configuration file")->required();
        sub->add_option("-p,--pair", opt.pair, "restrict the run to one configured pair");
        sub->add_option("-o,--out", opt.out_dir, "override the artifact directory");
        return sub;
    };

    CLI::App* ingest = add_common(app.add_subcommand("ingest", "validate raw candle csv files"));
    CLI::App* optimize =
        add_common(app.add_subcommand("optimize", "tune rule grids and evolve rule weights"));
    CLI::Option* seed_opt =
        optimize->add_option("-s,--seed", opt.seed, "random seed for the evolution");
    CLI::App* backtest =
        add_common(app.add_subcommand("backtest", "run the held-out comparison"));
    backtest->add_option("-l,--leverage", leverage_spec, "leverage list, e.g. 1,20");
    CLI::App* report = add_common(app.add_subcommand("report", "re-render saved comparisons"));
    report->add_option("-l,--leverage", leverage_spec, "leverage list, e.g. 1,20");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return 0;
        err << app.help();
        return 2;
    }

    try {
        opt.seed_set = seed_opt->count() > 0;
        if (!leverage_spec.empty()) opt.leverages = parse_number_list(leverage_spec);
        const RunConfig cfg = resolve_config(opt);
        if (ingest->parsed()) return cmd_ingest(cfg, out);
        if (optimize->parsed()) return cmd_optimize(cfg, out);
        if (backtest->parsed()) return cmd_backtest(cfg, out);
        if (report->parsed()) return cmd_report(cfg, out);
        throw Error("no subcommand dispatched");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace rulefx
