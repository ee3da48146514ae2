#pragma once

// Experiment specs as flat key=value text plus the on-disk run artifacts:
// per-trial objective history CSVs and population dumps. Every artifact
// carries the spec digest and the seed that produced it.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairmoo/dataset.hpp"
#include "fairmoo/ensemble.hpp"
#include "fairmoo/evolve.hpp"
#include "fairmoo/moea.hpp"

namespace fairmoo {

// "key = value" lines; '#' starts a comment, blank lines are skipped,
// duplicate keys rejected. Reads are tracked so loaders can flag typos.
class KvSpec {
  public:
    static KvSpec parse_file(const std::string& path);
    static KvSpec parse_text(const std::string& text, const std::string& origin = "<text>");

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // ConfigError when absent
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
    std::size_t get_size_or(const std::string& key, std::size_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const { return values_; }
    std::vector<std::string> unread() const;

    // Sorted "key = value" lines; the digest is FNV-1a over this text, so
    // reordering or commenting a spec file does not change its identity.
    std::string canonical() const;
    std::uint64_t digest() const;

  private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> read_;
};

std::vector<std::string> split_list(const std::string& text);
std::string hex_digest(std::uint64_t digest);

struct ExperimentSpec {
    // Data source: synthetic recipe, or a CSV with encoding options.
    bool synthetic = true;
    std::size_t synth_n = 2000;
    std::size_t synth_d = 5;
    double synth_bias = 0.3;
    std::uint64_t data_seed = 0;
    std::string csv_path;
    CsvOptions csv;
    std::vector<std::string> group_attrs;        // sensitive columns defining groups
    std::vector<std::string> privileged_values;  // aligned with group_attrs

    std::vector<double> ratios;  // split shares; train, validation, [selection,] test
    std::uint64_t split_seed = 0;

    RunConfig run;  // run.seed is the master seed
    std::size_t trials = 1;

    std::vector<EnsembleStrategy> strategies;
    std::size_t ensemble_size = 50;
    std::vector<Metric> report_criteria;  // ensemble report columns, G-mean inputs

    std::string out_dir;

    std::uint64_t digest = 0;
    std::string canonical;

    // Per-trial seed, counter-hashed from the master seed.
    std::uint64_t trial_seed(std::size_t trial) const;
};

ExperimentSpec experiment_from_kv(const KvSpec& kv);
ExperimentSpec load_experiment(const std::string& path);

// Split parts with their group partitions and the role each part plays.
// Two parts reuse validation for selection and test; three reuse validation
// for selection; four give every role its own part.
struct SplitParts {
    std::vector<Dataset> parts;
    std::vector<GroupPartition> groups;
    std::vector<std::string> names;
    std::size_t train = 0, val = 0, sel = 0, test = 0;
};
SplitParts build_data(const ExperimentSpec& spec);

// History CSV: '#' provenance comments, a criteria comment, then tidy rows
// "generation,individual,criterion,value" with %.17g values.
void write_history_csv(const std::string& path, const RunHistory& hist, std::uint64_t digest);
RunHistory read_history_csv(const std::string& path);

struct PopulationDump {
    Population pop;
    NetSpec net;
    std::vector<Metric> criteria;
    double alpha = 2.0;
    std::uint64_t digest = 0;
    std::uint64_t seed = 0;
};

// JSON lines: one meta object, then one object per member. Doubles survive
// the round trip exactly.
void write_population_jsonl(const std::string& path, const PopulationDump& dump);
PopulationDump read_population_jsonl(const std::string& path);

}  // namespace fairmoo
