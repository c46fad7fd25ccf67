#include "rulefx/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace rulefx {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        kv.entries.emplace_back(key, trim(stripped.substr(eq + 1)));
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    return parse_text(read_text_file(path));
}

const std::string* KeyValueFile::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

const std::string& KeyValueFile::require(const std::string& key) const {
    if (const std::string* v = find(key)) return *v;
    throw ConfigError("missing key '" + key + "'");
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

std::string KeyValueFile::serialize() const {
    std::string out;
    for (const auto& [k, v] : entries) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out << text;
    if (!out) throw Error("short write: " + path);
}

double parse_double(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ConfigError("expected a number, got an empty value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size())
        throw ConfigError("not a number: '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ConfigError("expected an integer, got an empty value");
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw ConfigError("not an integer: '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty() || s[0] == '-') throw ConfigError("expected a non-negative integer: '" + s + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size())
        throw ConfigError("not an integer: '" + s + "'");
    return v;
}

std::vector<double> parse_number_list(const std::string& text) {
    const std::string s = trim(text);
    if (s.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::string piece;
        std::istringstream in(s);
        while (std::getline(in, piece, ':')) parts.push_back(parse_double(piece));
        if (parts.size() != 2 && parts.size() != 3)
            throw ConfigError("range must be lo:hi or lo:hi:step, got '" + s + "'");
        const double lo = parts[0], hi = parts[1];
        const double step = parts.size() == 3 ? parts[2] : 1.0;
        if (!(step > 0.0)) throw ConfigError("range step must be positive in '" + s + "'");
        if (lo > hi) throw ConfigError("range is empty: '" + s + "'");
        std::vector<double> out;
        for (long k = 0;; ++k) {
            const double v = lo + static_cast<double>(k) * step;
            if (v > hi + step * 1e-9) break;
            out.push_back(v);
        }
        return out;
    }
    std::vector<double> out;
    std::string piece;
    std::istringstream in(s);
    while (std::getline(in, piece, ',')) out.push_back(parse_double(piece));
    if (out.empty()) throw ConfigError("expected at least one number, got '" + text + "'");
    return out;
}

// ---------------------------------------------------------------------------
// RunConfig.
// ---------------------------------------------------------------------------

namespace {

// Accumulates rule.<n>.* keys until the whole file is read.
struct RuleDraft {
    std::string kind;
    std::string id;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::pair<std::string, std::string>> grid;
};

const RuleSpec& reference_spec(RuleKind kind) {
    static const std::vector<RuleSpec> defaults = default_catalog();
    for (const auto& spec : defaults)
        if (spec.kind == kind) return spec;
    throw Error("unknown rule kind");
}

void check_param_name(const RuleSpec& reference, const std::string& id, const std::string& name) {
    if (!reference.defaults.has(name))
        throw ConfigError("rule '" + id + "' (" + to_string(reference.kind) +
                          ") has no parameter '" + name + "'");
}

// Replaces the axis if the parameter is already searched, else adds one.
void set_grid_axis(RuleSpec& rule, const std::string& name, std::vector<double> values) {
    for (auto& axis : rule.grid) {
        if (axis.name == name) {
            axis.values = std::move(values);
            return;
        }
    }
    rule.grid.push_back(ParamRange{name, std::move(values)});
}

}  // namespace

RunConfig RunConfig::from_kv(const KeyValueFile& kv) {
    RunConfig cfg;
    std::map<long, RuleDraft> drafts;
    std::vector<std::pair<std::string, std::string>> grid_overrides;  // (rule_id.param, spec)

    for (const auto& [key, value] : kv.entries) {
        if (key.rfind("data.", 0) == 0) {
            const std::string pair = key.substr(5);
            if (pair.empty()) throw ConfigError("data key needs a pair name: '" + key + "'");
            for (const auto& [existing, path] : cfg.data)
                if (existing == pair) throw ConfigError("duplicate data entry for " + pair);
            cfg.data.emplace_back(pair, value);
        } else if (key == "bar_interval") {
            cfg.bar_interval = parse_int(value);
            if (cfg.bar_interval < 0) throw ConfigError("bar_interval must be >= 0");
        } else if (key == "split.train_fraction") {
            cfg.split.train_fraction = parse_double(value);
            if (!(cfg.split.train_fraction > 0.0 && cfg.split.train_fraction < 1.0))
                throw ConfigError("split.train_fraction must be inside (0, 1)");
        } else if (key == "seed") {
            cfg.ga.seed = parse_uint(value);
            cfg.seed_set = true;
        } else if (key == "leverage") {
            cfg.leverages = parse_number_list(value);
            for (double lev : cfg.leverages)
                if (!(lev > 0.0)) throw ConfigError("leverage values must be positive");
        } else if (key == "out") {
            if (value.empty()) throw ConfigError("out must not be empty");
            cfg.out_dir = value;
        } else if (key == "ga.population_size") {
            cfg.ga.population_size = parse_int(value);
        } else if (key == "ga.parents_mating") {
            cfg.ga.parents_mating = parse_int(value);
        } else if (key == "ga.generations") {
            cfg.ga.generations = parse_int(value);
        } else if (key == "ga.mutation_prob") {
            cfg.ga.mutation_prob = parse_double(value);
        } else if (key == "ga.crossover_prob") {
            cfg.ga.crossover_prob = parse_double(value);
        } else if (key == "ga.mutation_step") {
            cfg.ga.mutation_step = parse_double(value);
        } else if (key.rfind("grid.", 0) == 0) {
            grid_overrides.emplace_back(key.substr(5), value);
        } else if (key.rfind("rule.", 0) == 0) {
            const std::string rest = key.substr(5);
            const auto dot = rest.find('.');
            if (dot == std::string::npos)
                throw ConfigError("malformed rule key '" + key + "'");
            const long slot = parse_int(rest.substr(0, dot));
            const std::string field = rest.substr(dot + 1);
            RuleDraft& draft = drafts[slot];
            if (field == "kind")
                draft.kind = value;
            else if (field == "id")
                draft.id = value;
            else if (field.rfind("param.", 0) == 0)
                draft.params.emplace_back(field.substr(6), value);
            else if (field.rfind("grid.", 0) == 0)
                draft.grid.emplace_back(field.substr(5), value);
            else
                throw ConfigError("malformed rule key '" + key + "'");
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    cfg.ga.validate();

    if (!drafts.empty()) {
        if (static_cast<Eigen::Index>(drafts.size()) != kFeatureCount)
            throw ConfigError("a custom catalog needs exactly " + std::to_string(kFeatureCount) +
                              " rule slots, got " + std::to_string(drafts.size()));
        std::vector<RuleSpec> catalog;
        long expected = 1;
        for (const auto& [slot, draft] : drafts) {
            if (slot != expected++)
                throw ConfigError("rule slots must be numbered 1.." +
                                  std::to_string(kFeatureCount) + " without gaps");
            if (draft.kind.empty())
                throw ConfigError("rule." + std::to_string(slot) + " is missing its kind");
            const RuleKind kind = rule_kind_from_string(draft.kind);
            RuleSpec rule = reference_spec(kind);
            rule.id = draft.id.empty() ? std::string(to_string(kind)) : draft.id;
            for (const auto& [name, text] : draft.params) {
                check_param_name(rule, rule.id, name);
                rule.defaults.set(name, parse_double(text));
            }
            bool grid_given = !draft.grid.empty();
            if (grid_given) rule.grid.clear();  // an explicit grid replaces the stock one
            for (const auto& [name, text] : draft.grid) {
                check_param_name(rule, rule.id, name);
                set_grid_axis(rule, name, parse_number_list(text));
            }
            catalog.push_back(std::move(rule));
        }
        for (std::size_t i = 0; i < catalog.size(); ++i)
            for (std::size_t j = i + 1; j < catalog.size(); ++j)
                if (catalog[i].id == catalog[j].id)
                    throw ConfigError("duplicate rule id '" + catalog[i].id +
                                      "'; give one slot an explicit rule.<n>.id");
        cfg.catalog = std::move(catalog);
    }

    for (const auto& [target, spec] : grid_overrides) {
        const auto dot = target.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == target.size())
            throw ConfigError("grid override must be grid.<rule_id>.<param>, got 'grid." +
                              target + "'");
        const std::string rule_id = target.substr(0, dot);
        const std::string param = target.substr(dot + 1);
        bool applied = false;
        for (auto& rule : cfg.catalog) {
            if (rule.id != rule_id) continue;
            check_param_name(reference_spec(rule.kind), rule.id, param);
            set_grid_axis(rule, param, parse_number_list(spec));
            applied = true;
            break;
        }
        if (!applied) throw ConfigError("grid override for unknown rule id '" + rule_id + "'");
    }

    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_kv(KeyValueFile::load(path));
}

}  // namespace rulefx
