#include "fairmoo/moea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairmoo/errors.hpp"
#include "fairmoo/fairmetrics.hpp"
#include "fairmoo/kernels.hpp"

namespace fairmoo {

namespace {

void check_same_width(const std::vector<std::vector<double>>& objs) {
    for (const auto& row : objs) {
        if (row.size() != objs.front().size()) throw DataError("objective width mismatch");
    }
}

// Min-max normalization per objective over the whole set; a flat objective
// keeps width 1 so it contributes zero to every comparison.
std::vector<std::vector<double>> normalize_rows(const std::vector<std::vector<double>>& objs) {
    const std::size_t m = objs.front().size();
    std::vector<double> lo(m, std::numeric_limits<double>::infinity());
    std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
    for (const auto& row : objs) {
        for (std::size_t k = 0; k < m; ++k) {
            lo[k] = std::min(lo[k], row[k]);
            hi[k] = std::max(hi[k], row[k]);
        }
    }
    std::vector<std::vector<double>> out(objs.size(), std::vector<double>(m));
    for (std::size_t i = 0; i < objs.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const double width = hi[k] - lo[k];
            out[i][k] = width > 0.0 ? (objs[i][k] - lo[k]) / width : 0.0;
        }
    }
    return out;
}

Genome clamp_weights(Genome g) {
    kern::active().clamp(g.weights.data(), -kWeightClamp, kWeightClamp, g.weights.size());
    return g;
}

// Index of the population member with the lowest value on `loss`; reuses the
// stored objective when the loss is one of the run's criteria. First minimum
// wins ties.
std::size_t best_on_loss(const Population& pop, const NetSpec& net, Metric loss,
                         const std::vector<Metric>& criteria, const Dataset& val,
                         const GroupPartition& val_part, double alpha) {
    const auto pos = std::find(criteria.begin(), criteria.end(), loss);
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double v = pos != criteria.end()
                             ? pop[i].objectives[static_cast<std::size_t>(pos - criteria.begin())]
                             : loss_value(net, pop[i].genome, val, val_part, loss, alpha);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    return best;
}

// Survival ranks for tournaments: position in the ranked population, with
// identical objective vectors collapsed onto the earliest position.
std::vector<std::size_t> tournament_ranks(const Population& pop) {
    std::vector<std::size_t> rank(pop.size());
    std::iota(rank.begin(), rank.end(), 0);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (pop[j].objectives == pop[i].objectives) {
                rank[i] = rank[j];
                break;
            }
        }
    }
    return rank;
}

// Variation for one parent pair: blend with probability crossover_prob
// (plain copies otherwise), then mutate each child independently.
std::pair<Genome, Genome> vary_pair(const Genome& p, const Genome& q, const VariationSpec& v,
                                    Rng& rng) {
    std::pair<Genome, Genome> kids =
        rng.uniform() < v.crossover_prob ? weight_crossover(p, q, rng) : std::make_pair(p, q);
    if (rng.uniform() < v.mutation_prob) kids.first = gaussian_mutation(kids.first, v.sigma, rng);
    if (rng.uniform() < v.mutation_prob) kids.second = gaussian_mutation(kids.second, v.sigma, rng);
    kids.first = clamp_weights(std::move(kids.first));
    kids.second = clamp_weights(std::move(kids.second));
    return kids;
}

}  // namespace

void VariationSpec::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("mutation strength must be positive");
    if (crossover_prob < 0.0 || crossover_prob > 1.0) {
        throw ConfigError("crossover_prob must be in [0,1]");
    }
    if (mutation_prob < 0.0 || mutation_prob > 1.0) {
        throw ConfigError("mutation_prob must be in [0,1]");
    }
}

void ReproSpec::validate(std::size_t lambda) const {
    if (losses.empty()) throw ConfigError("loss set must not be empty");
    for (Metric m : losses) {
        if (!metric_is_loss(m)) {
            throw ConfigError("'" + metric_name(m) + "' is not a differentiable loss");
        }
    }
    if (K < 1) throw ConfigError("K must be >= 1");
    if (losses.size() * K >= lambda) {
        throw ConfigError("losses * K must stay below lambda, or no mating parents remain");
    }
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("objective width mismatch");
    bool strict = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strict = true;
    }
    return strict;
}

std::vector<std::size_t> nondominated_set(const std::vector<std::vector<double>>& objs) {
    if (objs.empty()) throw DataError("empty objective set");
    check_same_width(objs);
    std::vector<std::size_t> order(objs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return objs[a] < objs[b] || (objs[a] == objs[b] && a < b);
    });
    // A dominator always sorts lexicographically earlier, so each candidate
    // only needs checking against the archive built so far, and archive
    // members can never be unseated later.
    std::vector<std::size_t> archive;
    for (std::size_t idx : order) {
        bool dominated = false;
        for (std::size_t kept : archive) {
            if (dominates(objs[kept], objs[idx])) {
                dominated = true;
                break;
            }
        }
        if (!dominated) archive.push_back(idx);
    }
    std::sort(archive.begin(), archive.end());
    return archive;
}

std::vector<std::vector<double>> objective_rows(const Population& pop) {
    std::vector<std::vector<double>> rows;
    rows.reserve(pop.size());
    for (const auto& ind : pop) rows.push_back(ind.objectives);
    return rows;
}

std::pair<Genome, Genome> weight_crossover_blend(const Genome& p, const Genome& q,
                                                 const std::vector<double>& u) {
    if (p.weights.size() != q.weights.size()) throw DataError("genome length mismatch");
    if (u.size() != p.weights.size()) throw DataError("blend vector length mismatch");
    Genome o1, o2;
    o1.weights.resize(p.weights.size());
    o2.weights.resize(p.weights.size());
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
        o1.weights[i] = u[i] * p.weights[i] + (1.0 - u[i]) * q.weights[i];
        o2.weights[i] = u[i] * q.weights[i] + (1.0 - u[i]) * p.weights[i];
    }
    return {std::move(o1), std::move(o2)};
}

std::pair<Genome, Genome> weight_crossover(const Genome& p, const Genome& q, Rng& rng) {
    if (p.weights.size() != q.weights.size()) throw DataError("genome length mismatch");
    std::vector<double> u(p.weights.size());
    for (double& v : u) v = rng.uniform();
    return weight_crossover_blend(p, q, u);
}

std::pair<Genome, Genome> weight_crossover(const Genome& p, const Genome& q, std::uint64_t seed) {
    Rng rng(seed);
    return weight_crossover(p, q, rng);
}

Genome gaussian_mutation(const Genome& g, double sigma, Rng& rng) {
    if (!(sigma > 0.0)) throw ConfigError("mutation strength must be positive");
    Genome out = g;
    for (double& w : out.weights) w += rng.normal(sigma);
    return out;
}

Genome gaussian_mutation(const Genome& g, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    return gaussian_mutation(g, sigma, rng);
}

IndicatorScores sra_scores(const std::vector<std::vector<double>>& objs) {
    if (objs.empty()) throw DataError("empty objective set");
    check_same_width(objs);
    const auto norm = normalize_rows(objs);
    const std::size_t n = norm.size();
    const std::size_t m = norm.front().size();
    IndicatorScores s;
    s.eps.assign(n, std::numeric_limits<double>::infinity());
    s.sde.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            double worst = -std::numeric_limits<double>::infinity();
            double dist2 = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double d = norm[y][k] - norm[x][k];
                worst = std::max(worst, d);
                if (d > 0.0) dist2 += d * d;
            }
            s.eps[x] = std::min(s.eps[x], worst);
            s.sde[x] = std::min(s.sde[x], std::sqrt(dist2));
        }
    }
    if (n == 1) {
        s.eps[0] = 0.0;
        s.sde[0] = 0.0;
    }
    return s;
}

std::vector<std::size_t> sra_rank_order(const std::vector<std::vector<double>>& objs, double pc,
                                        Rng& rng) {
    if (pc < 0.0 || pc > 1.0) throw ConfigError("pc must be in [0,1]");
    const IndicatorScores s = sra_scores(objs);
    const std::size_t n = objs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t pass = 0; pass < n; ++pass) {
        bool swapped = false;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            // Draw before branching so the stream advances identically on
            // both comparison kinds.
            const bool use_eps = rng.uniform() < pc;
            const double a = use_eps ? s.eps[order[j]] : s.sde[order[j]];
            const double b = use_eps ? s.eps[order[j + 1]] : s.sde[order[j + 1]];
            if (a < b) {
                std::swap(order[j], order[j + 1]);
                swapped = true;
            }
        }
        if (!swapped) break;
    }
    return order;
}

Population sra_survival(const Population& uni, std::size_t lambda, double pc,
                        std::uint64_t seed) {
    if (lambda < 1) throw SelectionError("survival needs lambda >= 1");
    if (uni.size() < lambda) {
        throw SelectionError("survival needs at least lambda individuals, got " +
                             std::to_string(uni.size()));
    }
    Rng rng(seed);
    const auto order = sra_rank_order(objective_rows(uni), pc, rng);
    Population out;
    out.reserve(lambda);
    for (std::size_t r = 0; r < lambda; ++r) out.push_back(uni[order[r]]);
    return out;
}

std::vector<std::size_t> mating_select_indices(const Population& pop, std::size_t count,
                                               Rng& rng) {
    if (pop.empty()) throw SelectionError("mating selection over an empty population");
    if (count > pop.size()) throw SelectionError("cannot mate-select more than the population");
    const auto rank = tournament_ranks(pop);
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t a = rng.uniform_index(pop.size());
        const std::size_t b = rng.uniform_index(pop.size());
        out.push_back(rank[a] <= rank[b] ? a : b);
    }
    return out;
}

std::vector<Individual> mating_select(const Population& pop, std::size_t count,
                                      std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Individual> out;
    out.reserve(count);
    for (std::size_t i : mating_select_indices(pop, count, rng)) out.push_back(pop[i]);
    return out;
}

std::vector<Individual> reproduce(const Population& pop, const NetSpec& net,
                                  const ReproSpec& rspec, const VariationSpec& vspec,
                                  const TrainSpec& base, const Dataset& train,
                                  const GroupPartition& train_part, const Dataset& val,
                                  const GroupPartition& val_part,
                                  const std::vector<Metric>& criteria, std::size_t birth_gen,
                                  std::uint64_t seed) {
    vspec.validate();
    rspec.validate(pop.size());
    if (pop.empty()) throw SelectionError("reproduce over an empty population");
    const std::size_t lambda = pop.size();
    const std::size_t m = rspec.losses.size();
    const std::size_t kappa = lambda - m * rspec.K;

    Rng rng(seed);
    std::vector<Individual> offspring;
    offspring.reserve(m * rspec.K + lambda);

    auto train_once = [&](const Genome& g, Metric loss) {
        TrainSpec ts = base;
        ts.loss = loss;
        ts.seed = rng.next_u64();
        try {
            return partial_train(net, g, train, train_part, ts);
        } catch (const TrainingError&) {
            // One retry with fresh batches; a second failure is a real fault.
            ts.seed = rng.next_u64();
            return partial_train(net, g, train, train_part, ts);
        }
    };
    auto emit = [&](Genome g, Metric loss) {
        Individual ind;
        ind.objectives = evaluate(net, g, val, val_part, criteria, base.alpha);
        ind.genome = std::move(g);
        ind.birth_gen = birth_gen;
        ind.lineage_tag = metric_name(loss);
        offspring.push_back(std::move(ind));
    };

    // Exploration: dive along each loss from the member currently best at it.
    for (std::size_t i = 0; i < m; ++i) {
        const Metric loss = rspec.losses[i];
        const std::size_t best = best_on_loss(pop, net, loss, criteria, val, val_part, base.alpha);
        const std::size_t mate = mating_select_indices(pop, 1, rng).front();
        Genome cur = vary_pair(pop[best].genome, pop[mate].genome, vspec, rng).first;
        for (std::size_t k = 0; k < rspec.K; ++k) {
            cur = train_once(cur, loss);
            emit(cur, loss);
        }
    }

    // Exploitation: lambda offspring out of kappa tournament-selected parents.
    const auto parents = mating_select_indices(pop, kappa, rng);
    std::vector<Genome> fresh;
    fresh.reserve(lambda);
    while (fresh.size() < lambda) {
        const Genome& p = pop[parents[rng.uniform_index(kappa)]].genome;
        const Genome& q = pop[parents[rng.uniform_index(kappa)]].genome;
        auto kids = vary_pair(p, q, vspec, rng);
        fresh.push_back(std::move(kids.first));
        if (fresh.size() < lambda) fresh.push_back(std::move(kids.second));
    }
    for (Genome& g : fresh) {
        const Metric loss = rspec.losses[rng.uniform_index(m)];
        emit(train_once(g, loss), loss);
    }
    return offspring;
}

}  // namespace fairmoo
