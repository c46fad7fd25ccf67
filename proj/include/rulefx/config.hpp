#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rulefx/candles.hpp"
#include "rulefx/errors.hpp"
#include "rulefx/optimize.hpp"
#include "rulefx/rules.hpp"

namespace rulefx {

// Flat "key = value" file. Full-line '#' comments and blank lines are
// ignored; keys keep their file order.
struct KeyValueFile {
    std::vector<std::pair<std::string, std::string>> entries;

    static KeyValueFile parse_text(const std::string& text);
    static KeyValueFile load(const std::string& path);  // MissingFile

    const std::string* find(const std::string& key) const;
    const std::string& require(const std::string& key) const;  // ConfigError
    void set(const std::string& key, const std::string& value);
    std::string serialize() const;
};

std::string read_text_file(const std::string& path);                   // MissingFile
void write_text_file(const std::string& path, const std::string& text);  // creates parents

double parse_double(const std::string& text);          // ConfigError on trailing junk
std::int64_t parse_int(const std::string& text);       // ConfigError
std::uint64_t parse_uint(const std::string& text);     // ConfigError

// "1,20" -> {1, 20}; "5:95:5" -> {5, 10, ..., 95}; "3:6" -> {3, 4, 5, 6};
// a single number -> one element.
std::vector<double> parse_number_list(const std::string& text);

// One run, fully described: which data files, how to split them, the rule
// catalog and its grids, GA settings, leverage levels and the output root.
//
// Recognized keys:
//   data.<PAIR>            = path/to/ohlc.csv
//   bar_interval           = seconds (0 infers from the data)
//   split.train_fraction   = (0, 1)
//   seed                   = uint64 (also settable per run on the command line)
//   leverage               = number list, e.g. 1,20
//   out                    = artifact directory root
//   ga.population_size | ga.parents_mating | ga.generations
//   ga.mutation_prob | ga.crossover_prob | ga.mutation_step
//   grid.<rule_id>.<param> = number list or lo:hi[:step] (narrows or adds a
//                            search axis on the default catalog)
//   rule.<n>.kind          = rule kind (n = 1..16; providing any rule.* keys
//                            replaces the whole catalog, all 16 slots)
//   rule.<n>.id            = custom id (defaults to the kind name)
//   rule.<n>.param.<name>  = fixed parameter value
//   rule.<n>.grid.<name>   = search axis for that parameter
// Unknown keys are rejected.
struct RunConfig {
    std::vector<std::pair<std::string, std::string>> data;  // (pair, path), file order
    std::int64_t bar_interval = 0;
    SplitSpec split;
    GAConfig ga;
    bool seed_set = false;
    std::vector<double> leverages{1.0};
    std::string out_dir = "runs/out";
    std::vector<RuleSpec> catalog = default_catalog();

    static RunConfig from_kv(const KeyValueFile& kv);
    static RunConfig from_file(const std::string& path);
};

}  // namespace rulefx
