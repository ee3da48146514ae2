#pragma once

// Base-model subset selection over a trained population, plus averaged
// prediction. Four strategies: the whole nondominated set (EnsAll), the
// per-criterion best nondominated models (EnsBest), the models bulging
// furthest below the extreme-point hyperplane (EnsKnee), and a diversity
// subset kept by removing the most crowded member (EnsDiv).

#include <cstddef>
#include <string>
#include <vector>

#include "fairmoo/dataset.hpp"
#include "fairmoo/metric.hpp"
#include "fairmoo/moea.hpp"
#include "fairmoo/nnet.hpp"

namespace fairmoo {

enum class EnsembleStrategy { all, best, knee, diverse };

const std::string& ensemble_strategy_name(EnsembleStrategy s);
EnsembleStrategy ensemble_strategy_from_name(const std::string& name);

struct EnsembleSpec {
    EnsembleStrategy strategy = EnsembleStrategy::all;
    std::size_t target_size = 1;  // e; knee and diverse only
    std::vector<Metric> criteria;
    double alpha = 2.0;

    void validate() const;  // throws ConfigError
};

struct Ensemble {
    NetSpec net;
    std::vector<Genome> members;
};

// Pure selection core over objective rows (one row per model, already
// measured on the ensemble-selection set). ce_index points at CE inside the
// rows for knee tie-breaking; pass npos to fall back to index order.
// Requesting more knee/diverse members than the nondominated set holds
// returns the whole set with a warning.
std::vector<std::size_t> select_indices(const std::vector<std::vector<double>>& objs,
                                        EnsembleStrategy strategy, std::size_t e,
                                        std::size_t ce_index);

// Re-evaluates every member of pop on ens_data, then picks per the spec.
Ensemble select(const Population& pop, const NetSpec& net, const Dataset& ens_data,
                const GroupPartition& part, const EnsembleSpec& spec);

// Arithmetic mean of member probabilities; the label is mean >= 0.5.
double predict(const Ensemble& ens, const double* x, std::size_t dim);
double predict(const Ensemble& ens, const std::vector<double>& x);
std::vector<double> predict_batch(const Ensemble& ens, const Dataset& ds);

// Criteria over the averaged probabilities; ACC reported as 1 - accuracy.
std::vector<double> evaluate_ensemble(const Ensemble& ens, const Dataset& test,
                                      const GroupPartition& part,
                                      const std::vector<Metric>& criteria, double alpha);

}  // namespace fairmoo
