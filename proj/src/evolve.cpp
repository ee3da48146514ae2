#include "fairmoo/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "fairmoo/errors.hpp"
#include "fairmoo/fairmetrics.hpp"
#include "fairmoo/rng.hpp"

namespace fairmoo {

namespace {

// Re-throws module errors with their dynamic type intact, prefixed with the
// loop position, so an aborted run says which generation failed.
template <typename Fn>
auto with_context(const std::string& ctx, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(ctx + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(ctx + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(ctx + ": " + e.what());
    } catch (const TrainingError& e) {
        throw TrainingError(ctx + ": " + e.what());
    } catch (const SelectionError& e) {
        throw SelectionError(ctx + ": " + e.what());
    }
}

std::vector<std::vector<double>> project_rows(const Population& pop,
                                              const std::vector<std::size_t>& keep) {
    std::vector<std::vector<double>> rows(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        rows[i].reserve(keep.size());
        for (std::size_t k : keep) rows[i].push_back(pop[i].objectives[k]);
    }
    return rows;
}

}  // namespace

void RunConfig::validate() const {
    net.validate();
    train_spec.validate();
    vspec.validate();
    if (lambda < 2) throw ConfigError("lambda must be >= 2");
    if (generations < 1) throw ConfigError("generations must be >= 1");
    repro.validate(lambda);
    if (criteria.empty()) throw ConfigError("criteria list is empty");
    if (std::find(criteria.begin(), criteria.end(), Metric::CE) == criteria.end()) {
        throw ConfigError("criteria must include CE");
    }
    for (Metric m : objectives) {
        if (std::find(criteria.begin(), criteria.end(), m) == criteria.end()) {
            throw ConfigError("objective '" + metric_name(m) + "' is not among the criteria");
        }
    }
    if (alpha == 0.0 || alpha == 1.0) throw ConfigError("entropy alpha must avoid 0 and 1");
    if (!(pc_min >= 0.0 && pc_max <= 1.0 && pc_min <= pc_max)) {
        throw ConfigError("need 0 <= pc_min <= pc_max <= 1");
    }
}

std::vector<Metric> RunConfig::survival_objectives() const {
    return objectives.empty() ? criteria : objectives;
}

std::pair<Population, RunHistory> run(const RunConfig& cfg, const Dataset& train,
                                      const GroupPartition& train_part, const Dataset& val,
                                      const GroupPartition& val_part) {
    cfg.validate();
    if (train.n == 0 || val.n == 0) throw DataError("empty train or validation set");
    if (train_part.size() != train.n || val_part.size() != val.n) {
        throw DataError("partition sizes do not match the datasets");
    }
    const GroupPartition vpart = val_part.compact();

    TrainSpec base = cfg.train_spec;
    base.alpha = cfg.alpha;

    // Positions of the survival objectives inside the criteria vector.
    std::vector<std::size_t> keep;
    for (Metric m : cfg.survival_objectives()) {
        keep.push_back(static_cast<std::size_t>(
            std::find(cfg.criteria.begin(), cfg.criteria.end(), m) - cfg.criteria.begin()));
    }

    Rng rng(cfg.seed);
    RunHistory hist;
    hist.criteria = cfg.criteria;
    hist.seed = cfg.seed;

    using clock = std::chrono::steady_clock;
    auto tick = clock::now();
    auto record = [&](const Population& pop, std::uint64_t gen_seed) {
        std::vector<std::vector<double>> rows;
        rows.reserve(pop.size());
        for (const auto& ind : pop) rows.push_back(ind.objectives);
        hist.objectives.push_back(std::move(rows));
        const auto now = clock::now();
        hist.wall_seconds.push_back(std::chrono::duration<double>(now - tick).count());
        hist.generation_seeds.push_back(gen_seed);
        tick = now;
    };

    Population pop = with_context("initialization", [&] {
        Population init;
        init.reserve(cfg.lambda);
        for (std::size_t i = 0; i < cfg.lambda; ++i) {
            Genome g = init_genome(cfg.net, rng.next_u64());
            TrainSpec ts = base;
            ts.loss = Metric::CE;
            ts.seed = rng.next_u64();
            g = partial_train(cfg.net, g, train, train_part, ts);
            Individual ind;
            ind.objectives = evaluate(cfg.net, g, val, vpart, cfg.criteria, cfg.alpha);
            ind.genome = std::move(g);
            ind.birth_gen = 0;
            ind.lineage_tag = "init";
            init.push_back(std::move(ind));
        }
        // Rank once so generation 1's mating selection sees survival order.
        const double pc = rng.uniform(cfg.pc_min, cfg.pc_max);
        Rng order_rng(rng.next_u64());
        const auto order = sra_rank_order(project_rows(init, keep), pc, order_rng);
        Population ranked;
        ranked.reserve(init.size());
        for (std::size_t idx : order) ranked.push_back(std::move(init[idx]));
        return ranked;
    });
    record(pop, 0);

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        with_context("generation " + std::to_string(gen), [&] {
            const double pc = rng.uniform(cfg.pc_min, cfg.pc_max);
            const std::uint64_t repro_seed = rng.next_u64();
            Population uni = pop;
            auto offspring = reproduce(pop, cfg.net, cfg.repro, cfg.vspec, base, train,
                                       train_part, val, vpart, cfg.criteria, gen, repro_seed);
            for (auto& ind : offspring) uni.push_back(std::move(ind));

            Rng order_rng(rng.next_u64());
            const auto order = sra_rank_order(project_rows(uni, keep), pc, order_rng);
            Population next;
            next.reserve(cfg.lambda);
            for (std::size_t r = 0; r < cfg.lambda; ++r) next.push_back(std::move(uni[order[r]]));
            pop = std::move(next);
            record(pop, repro_seed);
            return 0;
        });
    }
    return {std::move(pop), std::move(hist)};
}

}  // namespace fairmoo
