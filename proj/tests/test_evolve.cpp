#include "fairmoo/evolve.hpp"

#include <cmath>
#include <cstddef>

#include "doctest.h"
#include "fairmoo/dataset.hpp"
#include "fairmoo/errors.hpp"
#include "fairmoo/metric.hpp"
#include "support.hpp"

using namespace fairmoo;

namespace {

struct Fixture {
    Dataset train;
    Dataset val;
    GroupPartition train_part;
    GroupPartition val_part;
    RunConfig cfg;
};

Fixture small_run(std::size_t generations) {
    Fixture f;
    const Dataset all = synth_biased(240, 3, 0.3, 5);
    SplitSpec split_spec;
    split_spec.ratios = {0.75, 0.25};
    split_spec.seed = 17;
    const auto parts = split_indices(all.labels, split_spec);
    f.train = all.subset(parts[0]);
    f.val = all.subset(parts[1]);
    f.train_part = make_groups(f.train, {"group"}, {"A"});
    f.val_part = make_groups(f.val, {"group"}, {"A"});

    f.cfg.net.input_dim = all.dim;
    f.cfg.net.hidden = 4;
    f.cfg.train_spec.learning_rate = 0.05;
    f.cfg.train_spec.batch_size = 32;
    f.cfg.repro.K = 2;
    f.cfg.repro.losses = {Metric::CE, Metric::FI, Metric::FG};
    f.cfg.criteria = {Metric::CE, Metric::FI, Metric::FG};
    f.cfg.lambda = 10;
    f.cfg.generations = generations;
    f.cfg.seed = 404;
    return f;
}

}  // namespace

TEST_CASE("run records every generation at full width") {
    auto f = small_run(3);
    const auto [pop, hist] = run(f.cfg, f.train, f.train_part, f.val, f.val_part);

    CHECK(pop.size() == f.cfg.lambda);
    CHECK(hist.criteria == f.cfg.criteria);
    CHECK(hist.seed == f.cfg.seed);
    REQUIRE(hist.objectives.size() == f.cfg.generations + 1);
    REQUIRE(hist.generation_seeds.size() == f.cfg.generations + 1);
    REQUIRE(hist.wall_seconds.size() == f.cfg.generations + 1);
    CHECK(hist.generation_seeds[0] == 0);
    for (std::size_t g = 1; g < hist.generation_seeds.size(); ++g) {
        CHECK(hist.generation_seeds[g] != 0);
    }
    for (const auto& gen : hist.objectives) {
        REQUIRE(gen.size() == f.cfg.lambda);
        for (const auto& row : gen) {
            REQUIRE(row.size() == f.cfg.criteria.size());
            for (double v : row) CHECK(std::isfinite(v));
        }
    }
    // The final population is the last recorded generation, same order.
    for (std::size_t i = 0; i < pop.size(); ++i) {
        CHECK(pop[i].objectives == hist.objectives.back()[i]);
        CHECK(pop[i].genome.weights.size() == f.cfg.net.genome_length());
    }
}

TEST_CASE("run is deterministic per seed") {
    auto f = small_run(2);
    const auto a = run(f.cfg, f.train, f.train_part, f.val, f.val_part);
    const auto b = run(f.cfg, f.train, f.train_part, f.val, f.val_part);
    CHECK(a.second.objectives == b.second.objectives);
    CHECK(a.second.generation_seeds == b.second.generation_seeds);
    for (std::size_t i = 0; i < a.first.size(); ++i) {
        CHECK(a.first[i].genome.weights == b.first[i].genome.weights);
    }

    f.cfg.seed = 405;
    const auto c = run(f.cfg, f.train, f.train_part, f.val, f.val_part);
    CHECK(c.second.objectives != a.second.objectives);
}

TEST_CASE("survival can be restricted to a subset of the criteria") {
    auto f = small_run(2);
    f.cfg.objectives = {Metric::CE};
    const auto [pop, hist] = run(f.cfg, f.train, f.train_part, f.val, f.val_part);
    // All criteria are still recorded even though selection only sees CE.
    REQUIRE(hist.objectives.back().front().size() == 3);
    CHECK(pop.size() == f.cfg.lambda);
    CHECK(f.cfg.survival_objectives() == std::vector<Metric>{Metric::CE});
    f.cfg.objectives.clear();
    CHECK(f.cfg.survival_objectives() == f.cfg.criteria);
}

TEST_CASE("run validates configuration and data up front") {
    auto f = small_run(1);

    RunConfig bad = f.cfg;
    bad.criteria = {Metric::FI, Metric::FG};  // CE missing
    CHECK_THROWS_AS(run(bad, f.train, f.train_part, f.val, f.val_part), ConfigError);

    bad = f.cfg;
    bad.objectives = {Metric::ACC};  // not among the criteria
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = f.cfg;
    bad.lambda = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = f.cfg;
    bad.generations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = f.cfg;
    bad.repro.K = 5;  // 3 losses * 5 >= lambda 10
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = f.cfg;
    bad.pc_min = 0.7;
    bad.pc_max = 0.3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = f.cfg;
    bad.alpha = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    CHECK_THROWS_AS(run(f.cfg, Dataset{}, GroupPartition{}, f.val, f.val_part), DataError);
    // Partition built for a different dataset size.
    CHECK_THROWS_AS(run(f.cfg, f.train, f.val_part, f.val, f.val_part), DataError);
}
