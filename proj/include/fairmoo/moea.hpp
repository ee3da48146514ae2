#pragma once

// Dominance machinery, indicator-based stochastic-ranking survival
// selection, tournament mating selection, weight crossover and Gaussian
// mutation, and the two-part reproduction step (per-loss exploration chains
// plus mating-selected exploitation offspring).

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairmoo/dataset.hpp"
#include "fairmoo/metric.hpp"
#include "fairmoo/nnet.hpp"
#include "fairmoo/rng.hpp"

namespace fairmoo {

struct Individual {
    Genome genome;
    std::vector<double> objectives;  // aligned with the run's criteria list
    std::size_t birth_gen = 0;
    std::string lineage_tag;  // "init" or the loss tag that trained it
};

using Population = std::vector<Individual>;

struct VariationSpec {
    double sigma = 0.05;  // mutation strength
    double crossover_prob = 1.0;
    double mutation_prob = 1.0;

    void validate() const;  // throws ConfigError
};

struct ReproSpec {
    std::size_t K = 10;          // partial-training steps per extreme model
    std::vector<Metric> losses;  // differentiable criteria driving training

    // Needs losses nonempty and |losses| * K < lambda so at least one
    // mating parent remains for the exploitation half.
    void validate(std::size_t lambda) const;
};

// Offspring weights are clamped into [-kWeightClamp, kWeightClamp] after
// variation so genomes cannot run away.
inline constexpr double kWeightClamp = 1e3;

// Strict Pareto dominance, everything minimized.
bool dominates(const std::vector<double>& a, const std::vector<double>& b);

// Indices not dominated by any other row, ascending. Lexicographic sweep
// with an incremental archive, not the quadratic all-pairs scan.
std::vector<std::size_t> nondominated_set(const std::vector<std::vector<double>>& objs);

std::vector<std::vector<double>> objective_rows(const Population& pop);

// o1_i = u_i p_i + (1 - u_i) q_i and o2_i with the roles swapped, so
// o1 + o2 == p + q coordinatewise.
std::pair<Genome, Genome> weight_crossover_blend(const Genome& p, const Genome& q,
                                                 const std::vector<double>& u);
std::pair<Genome, Genome> weight_crossover(const Genome& p, const Genome& q, Rng& rng);
std::pair<Genome, Genome> weight_crossover(const Genome& p, const Genome& q, std::uint64_t seed);

// Adds independent N(0, sigma^2) noise to every coordinate.
Genome gaussian_mutation(const Genome& g, double sigma, Rng& rng);
Genome gaussian_mutation(const Genome& g, double sigma, std::uint64_t seed);

// Per-member indicator scores over min-max normalized objectives, both
// maximized. eps: worst-case additive margin by which the closest rival
// fails to cover the member (negative once dominated). sde: distance to the
// nearest rival after shifting rivals to be no better in any objective, a
// crowding measure that ignores directions where the rival is worse.
struct IndicatorScores {
    std::vector<double> eps;
    std::vector<double> sde;
};
IndicatorScores sra_scores(const std::vector<std::vector<double>>& objs);

// Full stochastic ranking, best first: |objs| bubble passes with early
// exit; each adjacent comparison uses eps with probability pc, sde
// otherwise.
std::vector<std::size_t> sra_rank_order(const std::vector<std::vector<double>>& objs, double pc,
                                        Rng& rng);

// Ranks the union and keeps the top lambda in rank order. The returned
// order is the survival rank consumed by mating selection.
Population sra_survival(const Population& uni, std::size_t lambda, double pc,
                        std::uint64_t seed);

// Binary tournament with replacement on the population's rank order.
// Members with identical objective vectors share a rank; a tied tournament
// goes to the first contestant drawn.
std::vector<std::size_t> mating_select_indices(const Population& pop, std::size_t count,
                                               Rng& rng);
std::vector<Individual> mating_select(const Population& pop, std::size_t count,
                                      std::uint64_t seed);

// One reproduction step over a ranked population of size lambda.
// Exploration: for each loss, the member best on that loss is crossed with
// a tournament mate, mutated, then partially trained K times cumulatively,
// each step emitting an offspring evaluated on val. Exploitation:
// lambda - |losses|*K mating-selected parents produce lambda offspring by
// crossover and mutation, each trained once on a uniformly drawn loss.
// Returns |losses|*K + lambda evaluated offspring; base supplies the SGD
// settings and entropy alpha, its loss and seed fields are overridden.
// A training failure is retried once with fresh draws, then propagates.
std::vector<Individual> reproduce(const Population& pop, const NetSpec& net,
                                  const ReproSpec& rspec, const VariationSpec& vspec,
                                  const TrainSpec& base, const Dataset& train,
                                  const GroupPartition& train_part, const Dataset& val,
                                  const GroupPartition& val_part,
                                  const std::vector<Metric>& criteria, std::size_t birth_gen,
                                  std::uint64_t seed);

}  // namespace fairmoo
