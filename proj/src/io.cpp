#include "fairmoo/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "fairmoo/errors.hpp"
#include "fairmoo/rng.hpp"

namespace fairmoo {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& key) {
    const char* s = text.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || !std::isfinite(v))
        throw ConfigError("spec key '" + key + "': not a number: '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
    const char* s = text.c_str();
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
        throw ConfigError("spec key '" + key + "': not an unsigned integer: '" + text + "'");
    return v;
}

// Seed-derivation stream tags; arbitrary but fixed so artifacts reproduce.
constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kSplitStream = 0x59113;
constexpr std::uint64_t kTrialStream = 0x771a1;

}  // namespace

KvSpec KvSpec::parse_text(const std::string& text, const std::string& origin) {
    KvSpec kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!kv.values_.emplace(key, value).second)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
    }
    return kv;
}

KvSpec KvSpec::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open spec file " + path);
    std::ostringstream all;
    all << in.rdbuf();
    return parse_text(all.str(), path);
}

bool KvSpec::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& KvSpec::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing spec key '" + key + "'");
    read_.insert(key);
    return it->second;
}

std::string KvSpec::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double KvSpec::get_double(const std::string& key) const { return parse_double(get(key), key); }

double KvSpec::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t KvSpec::get_u64_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? parse_u64(get(key), key) : fallback;
}

std::size_t KvSpec::get_size_or(const std::string& key, std::size_t fallback) const {
    return has(key) ? static_cast<std::size_t>(parse_u64(get(key), key)) : fallback;
}

bool KvSpec::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get(key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("spec key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::string> KvSpec::unread() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!read_.count(k)) out.push_back(k);
    return out;
}

std::string KvSpec::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t KvSpec::digest() const {
    // FNV-1a, stable across platforms unlike std::hash.
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string hex_digest(std::uint64_t digest) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

std::uint64_t ExperimentSpec::trial_seed(std::size_t trial) const {
    return hash_combine(hash_combine(run.seed, kTrialStream), trial);
}

ExperimentSpec experiment_from_kv(const KvSpec& kv) {
    ExperimentSpec spec;
    spec.run.seed = kv.get_u64_or("seed", 0);

    std::string source = kv.get_or("data.source", "synth");
    if (source == "synth") {
        spec.synthetic = true;
        spec.synth_n = kv.get_size_or("data.synth.n", 2000);
        spec.synth_d = kv.get_size_or("data.synth.dim", 5);
        spec.synth_bias = kv.get_double_or("data.synth.bias", 0.3);
        spec.data_seed = kv.get_u64_or("data.seed", hash_combine(spec.run.seed, kDataStream));
        spec.group_attrs = {"group"};
        spec.privileged_values = {"A"};
    } else if (source == "csv") {
        spec.synthetic = false;
        spec.csv_path = kv.get("data.path");
        spec.csv.label_col = kv.get("data.label");
        spec.csv.sensitive_cols = split_list(kv.get("data.sensitive"));
        spec.csv.sensitive_in_features = kv.get_bool_or("data.sensitive_in_features", true);
        spec.group_attrs = spec.csv.sensitive_cols;
        spec.privileged_values = split_list(kv.get("data.privileged"));
        for (const auto& [key, value] : kv.entries()) {
            if (key.rfind("data.bucket.", 0) != 0) continue;
            std::vector<double> thresholds;
            for (const auto& item : split_list(kv.get(key)))
                thresholds.push_back(parse_double(item, key));
            spec.csv.buckets[key.substr(12)] = thresholds;
        }
    } else {
        throw ConfigError("data.source must be 'synth' or 'csv', got '" + source + "'");
    }

    for (const auto& item : split_list(kv.get_or("split.ratios", "0.5,0.125,0.125,0.25")))
        spec.ratios.push_back(parse_double(item, "split.ratios"));
    spec.split_seed = kv.get_u64_or("split.seed", hash_combine(spec.run.seed, kSplitStream));

    spec.run.net.input_dim = 0;  // from the data at command time
    spec.run.net.hidden = kv.get_size_or("net.hidden", 16);
    std::string act = kv.get_or("net.activation", "relu");
    if (act == "relu")
        spec.run.net.activation = Activation::relu;
    else if (act == "tanh")
        spec.run.net.activation = Activation::tanh;
    else
        throw ConfigError("net.activation must be 'relu' or 'tanh', got '" + act + "'");

    spec.run.train_spec.learning_rate = kv.get_double_or("train.lr", 0.01);
    spec.run.train_spec.batch_size = kv.get_size_or("train.batch", 64);
    spec.run.train_spec.epochs = kv.get_size_or("train.epochs", 1);

    spec.run.criteria = parse_metric_list(kv.get_or("moea.criteria", "CE,FI,FG"));
    if (kv.has("moea.objectives"))
        spec.run.objectives = parse_metric_list(kv.get("moea.objectives"));
    if (kv.has("moea.losses")) {
        spec.run.repro.losses = parse_metric_list(kv.get("moea.losses"));
    } else {
        for (Metric m : spec.run.criteria)
            if (metric_is_loss(m)) spec.run.repro.losses.push_back(m);
    }
    spec.run.repro.K = kv.get_size_or("moea.K", 10);
    spec.run.lambda = kv.get_size_or("moea.lambda", 20);
    spec.run.generations = kv.get_size_or("moea.generations", 30);
    spec.run.vspec.sigma = kv.get_double_or("moea.sigma", 0.05);
    spec.run.vspec.crossover_prob = kv.get_double_or("moea.crossover_prob", 1.0);
    spec.run.vspec.mutation_prob = kv.get_double_or("moea.mutation_prob", 1.0);
    spec.run.alpha = kv.get_double_or("moea.alpha", 2.0);
    spec.run.pc_min = kv.get_double_or("moea.pc_min", 0.4);
    spec.run.pc_max = kv.get_double_or("moea.pc_max", 0.6);

    spec.trials = kv.get_size_or("trials", 1);
    if (spec.trials < 1) throw ConfigError("trials must be at least 1");

    for (const auto& name :
         split_list(kv.get_or("ensemble.strategies", "EnsAll,EnsBest,EnsKnee,EnsDiv")))
        spec.strategies.push_back(ensemble_strategy_from_name(name));
    spec.ensemble_size = kv.get_size_or("ensemble.size", 50);
    spec.report_criteria = parse_metric_list(
        kv.get_or("ensemble.criteria", "ACC,Fair1,Fair2,Fair3,Fair4,Fair5,Fair6,Fair7,Fair8"));

    spec.out_dir = kv.get_or("out", "");

    auto leftover = kv.unread();
    if (!leftover.empty()) {
        std::string msg = "unknown spec keys:";
        for (const auto& k : leftover) msg += " '" + k + "'";
        throw ConfigError(msg);
    }

    spec.digest = kv.digest();
    spec.canonical = kv.canonical();
    return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
    return experiment_from_kv(KvSpec::parse_file(path));
}

SplitParts build_data(const ExperimentSpec& spec) {
    Dataset full = spec.synthetic
                       ? synth_biased(spec.synth_n, spec.synth_d, spec.synth_bias, spec.data_seed)
                       : load_csv(spec.csv_path, spec.csv);
    GroupPartition all = make_groups(full, spec.group_attrs, spec.privileged_values);

    if (spec.ratios.size() < 2)
        throw ConfigError("split.ratios needs at least train and validation parts");
    SplitSpec sp{spec.ratios, spec.split_seed, default_part_names(spec.ratios.size())};
    auto idx = split_indices(full.labels, sp);

    SplitParts out;
    out.names = sp.part_names;
    for (const auto& part_idx : idx) {
        out.parts.push_back(full.subset(part_idx));
        out.groups.push_back(all.restrict_to(part_idx));
    }
    std::size_t k = out.parts.size();
    out.train = 0;
    out.val = 1;
    out.sel = k >= 4 ? 2 : 1;
    out.test = k >= 4 ? 3 : k - 1;
    if (k > 4) warn("split has " + std::to_string(k) + " parts; parts past the fourth are idle");
    return out;
}

void write_history_csv(const std::string& path, const RunHistory& hist, std::uint64_t digest) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "# fairmoo history\n";
    out << "# spec " << hex_digest(digest) << "\n";
    out << "# seed " << hist.seed << "\n";
    out << "# criteria " << format_metric_list(hist.criteria) << "\n";
    out << "# generation_seeds ";
    for (std::size_t g = 0; g < hist.generation_seeds.size(); ++g)
        out << (g ? "," : "") << hist.generation_seeds[g];
    out << "\n";
    out << "generation,individual,criterion,value\n";
    for (std::size_t g = 0; g < hist.objectives.size(); ++g)
        for (std::size_t i = 0; i < hist.objectives[g].size(); ++i)
            for (std::size_t c = 0; c < hist.criteria.size(); ++c)
                out << g << "," << i << "," << metric_name(hist.criteria[c]) << ","
                    << g17(hist.objectives[g][i][c]) << "\n";
    if (!out) throw DataError("write failed for " + path);
}

RunHistory read_history_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    RunHistory hist;
    std::string line;
    bool saw_header = false;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ReportError(path + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream c(line.substr(1));
            std::string tag;
            c >> tag;
            if (tag == "seed") {
                c >> hist.seed;
            } else if (tag == "criteria") {
                std::string rest;
                std::getline(c, rest);
                hist.criteria = parse_metric_list(rest);
            } else if (tag == "generation_seeds") {
                std::string rest;
                std::getline(c, rest);
                for (const auto& item : split_list(rest))
                    hist.generation_seeds.push_back(parse_u64(item, "generation_seeds"));
            }
            continue;
        }
        if (!saw_header) {
            if (line != "generation,individual,criterion,value") fail("unexpected header");
            if (hist.criteria.empty()) fail("missing criteria comment");
            saw_header = true;
            continue;
        }
        auto fields = split_list(line);
        if (fields.size() != 4) fail("expected 4 fields");
        std::size_t g = static_cast<std::size_t>(parse_u64(fields[0], "generation"));
        std::size_t i = static_cast<std::size_t>(parse_u64(fields[1], "individual"));
        Metric m = metric_from_name(fields[2]);
        auto it = std::find(hist.criteria.begin(), hist.criteria.end(), m);
        if (it == hist.criteria.end()) fail("criterion not in header list");
        std::size_t c = static_cast<std::size_t>(it - hist.criteria.begin());
        if (g >= hist.objectives.size()) hist.objectives.resize(g + 1);
        if (i >= hist.objectives[g].size()) hist.objectives[g].resize(i + 1);
        auto& row = hist.objectives[g][i];
        if (row.empty())
            row.assign(hist.criteria.size(), std::numeric_limits<double>::quiet_NaN());
        row[c] = parse_double(fields[3], "value");
    }
    if (!saw_header) throw ReportError(path + ": not a history file");
    for (const auto& gen : hist.objectives)
        for (const auto& row : gen) {
            if (row.size() != hist.criteria.size())
                throw ReportError(path + ": ragged objective rows");
            for (double v : row)
                if (std::isnan(v)) throw ReportError(path + ": incomplete objective rows");
        }
    return hist;
}

void write_population_jsonl(const std::string& path, const PopulationDump& dump) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    json meta;
    meta["kind"] = "fairmoo_population";
    meta["spec"] = hex_digest(dump.digest);
    meta["seed"] = dump.seed;
    meta["alpha"] = dump.alpha;
    json crit = json::array();
    for (Metric m : dump.criteria) crit.push_back(metric_name(m));
    meta["criteria"] = crit;
    meta["net"] = {{"input_dim", dump.net.input_dim},
                   {"hidden", dump.net.hidden},
                   {"activation", dump.net.activation == Activation::relu ? "relu" : "tanh"}};
    out << meta.dump() << "\n";
    for (const auto& ind : dump.pop) {
        json j;
        j["genome"] = ind.genome.weights;
        j["objectives"] = ind.objectives;
        j["birth_gen"] = ind.birth_gen;
        j["lineage"] = ind.lineage_tag;
        out << j.dump() << "\n";
    }
    if (!out) throw DataError("write failed for " + path);
}

PopulationDump read_population_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    PopulationDump dump;
    std::string line;
    bool saw_meta = false;
    std::size_t lineno = 0;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            json j = json::parse(line);
            if (!saw_meta) {
                if (j.value("kind", "") != "fairmoo_population")
                    throw DataError(path + ": not a population dump");
                dump.digest = std::stoull(j.at("spec").get<std::string>(), nullptr, 16);
                dump.seed = j.at("seed").get<std::uint64_t>();
                dump.alpha = j.at("alpha").get<double>();
                for (const auto& name : j.at("criteria"))
                    dump.criteria.push_back(metric_from_name(name.get<std::string>()));
                const auto& net = j.at("net");
                dump.net.input_dim = net.at("input_dim").get<std::size_t>();
                dump.net.hidden = net.at("hidden").get<std::size_t>();
                std::string act = net.at("activation").get<std::string>();
                dump.net.activation = act == "tanh" ? Activation::tanh : Activation::relu;
                saw_meta = true;
                continue;
            }
            Individual ind;
            ind.genome.weights = j.at("genome").get<std::vector<double>>();
            ind.objectives = j.at("objectives").get<std::vector<double>>();
            ind.birth_gen = j.at("birth_gen").get<std::size_t>();
            ind.lineage_tag = j.value("lineage", "");
            if (ind.genome.weights.size() != dump.net.genome_length())
                throw DataError(path + ": genome length does not match the net shape");
            dump.pop.push_back(std::move(ind));
        }
    } catch (const json::exception& e) {
        throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!saw_meta) throw DataError(path + ": empty population dump");
    return dump;
}

}  // namespace fairmoo
