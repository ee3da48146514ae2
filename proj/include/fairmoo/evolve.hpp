#pragma once

// Generational loop: initialize and partially train a population, evaluate
// on the validation set, then alternate reproduction and survival selection
// for a fixed number of generations, recording per-generation objectives.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "fairmoo/dataset.hpp"
#include "fairmoo/metric.hpp"
#include "fairmoo/moea.hpp"
#include "fairmoo/nnet.hpp"

namespace fairmoo {

struct RunConfig {
    NetSpec net;
    TrainSpec train_spec;  // loss and seed fields are driven by the loop
    VariationSpec vspec;
    ReproSpec repro;
    std::vector<Metric> criteria;    // evaluated and recorded; must include CE
    std::vector<Metric> objectives;  // survival subset of criteria; empty = all
    std::size_t lambda = 20;
    std::size_t generations = 30;
    double alpha = 2.0;  // entropy order, shared by training and evaluation
    double pc_min = 0.4;  // per-generation comparison probability is drawn
    double pc_max = 0.6;  // uniformly from [pc_min, pc_max]
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError

    // objectives, or criteria when objectives is empty.
    std::vector<Metric> survival_objectives() const;
};

struct RunHistory {
    std::vector<Metric> criteria;
    // [generation][individual][criterion]; entry 0 is the evaluated initial
    // population, so there are generations + 1 entries.
    std::vector<std::vector<std::vector<double>>> objectives;
    std::vector<double> wall_seconds;          // per recorded generation
    std::vector<std::uint64_t> generation_seeds;  // reproduce seed, 0 for init
    std::uint64_t seed = 0;
};

// Training happens on train, every evaluation on val. The partitions must
// describe the matching dataset; empty groups in val_part are compacted
// away. Deterministic per cfg.seed.
std::pair<Population, RunHistory> run(const RunConfig& cfg, const Dataset& train,
                                      const GroupPartition& train_part, const Dataset& val,
                                      const GroupPartition& val_part);

}  // namespace fairmoo
