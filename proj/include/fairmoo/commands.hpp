#pragma once

// Command drivers behind the CLI: train runs the evolutionary loop per
// trial and writes artifacts, ensemble selects and scores base-model
// subsets from a dump, report pools run directories into indicator tables,
// synth writes a biased synthetic dataset.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fairmoo {

struct TrainOptions {
    std::string spec_path;
    std::string out_dir;  // empty: the spec's 'out' key
};
void cmd_train(const TrainOptions& opt);

struct EnsembleOptions {
    std::string spec_path;        // rebuilds the data and splits
    std::string population_path;  // dump written by train
    std::string out_dir;
    std::vector<std::string> strategies;  // empty: from the spec
    std::size_t size = 0;                 // 0: from the spec
    std::string criteria;                 // report columns; empty: from the spec
};
void cmd_ensemble(const EnsembleOptions& opt);

struct ReportOptions {
    std::vector<std::string> run_dirs;  // one per compared configuration
    std::string out_dir;
    std::string objectives;     // projection tags; empty: every criterion
    std::string baseline_path;  // key=value point for the dominance table
    double alpha_sig = 0.05;
};
void cmd_report(const ReportOptions& opt);

struct SynthOptions {
    std::size_t n = 2000;
    std::size_t dim = 5;
    double bias = 0.3;
    std::uint64_t seed = 1;
    std::string out_path;
};
void cmd_synth(const SynthOptions& opt);

}  // namespace fairmoo
