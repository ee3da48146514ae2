#pragma once

// One-hidden-layer binary classifier stored as a flat real genome, with
// forward inference and mini-batch SGD on a selectable differentiable loss.
//
// Genome layout, in order:
//   W1  hidden x input_dim, row-major (row h = weights into hidden unit h)
//   b1  hidden
//   w2  hidden (weights into the output unit)
//   b2  1
// Total length: hidden * (input_dim + 1) + hidden + 1.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fairmoo/dataset.hpp"
#include "fairmoo/metric.hpp"

namespace fairmoo {

enum class Activation { relu, tanh };

struct NetSpec {
    std::size_t input_dim = 0;
    std::size_t hidden = 0;
    Activation activation = Activation::relu;

    std::size_t genome_length() const { return hidden * (input_dim + 1) + hidden + 1; }
    void validate() const;  // throws ConfigError
};

struct Genome {
    std::vector<double> weights;
};

struct TrainSpec {
    double learning_rate = 0.01;  // 0 makes partial_train a no-op
    std::size_t batch_size = 64;
    std::size_t epochs = 1;       // passes per partial-training call
    Metric loss = Metric::CE;     // must satisfy metric_is_loss
    double alpha = 2.0;           // entropy order for the unfairness losses
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

// Glorot-uniform weights, layer bound sqrt(6 / (fan_in + fan_out)); biases 0.
Genome init_genome(const NetSpec& net, std::uint64_t seed);

// Positive-class probability, clamped to [kProbClamp, 1 - kProbClamp].
double forward(const NetSpec& net, const Genome& g, const double* x, std::size_t dim);
double forward(const NetSpec& net, const Genome& g, const std::vector<double>& x);
std::vector<double> forward_batch(const NetSpec& net, const Genome& g, const Dataset& ds);

// Mean loss over the batch. CE ignores the partition and alpha; FI is the
// entropy of the benefit vector; FG its between-group share, taken over the
// groups present in the batch.
double loss_value(const NetSpec& net, const Genome& g, const Dataset& batch,
                  const GroupPartition& part, Metric loss, double alpha);

// d(loss)/d(genome) over the batch; matches loss_value including the skipped
// d(p)/d(z) at clamped outputs. Exposed for finite-difference checks.
std::vector<double> loss_gradient(const NetSpec& net, const Genome& g, const Dataset& batch,
                                  const GroupPartition& part, Metric loss, double alpha);

// epochs x shuffled mini-batch SGD passes; returns a new genome, the input
// is untouched. Deterministic per ts.seed. Throws TrainingError if a
// gradient or weight turns non-finite.
Genome partial_train(const NetSpec& net, const Genome& g, const Dataset& train,
                     const GroupPartition& part, const TrainSpec& ts);

}  // namespace fairmoo
