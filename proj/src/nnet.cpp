#include "fairmoo/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairmoo/errors.hpp"
#include "fairmoo/fairmetrics.hpp"
#include "fairmoo/kernels.hpp"
#include "fairmoo/rng.hpp"

namespace fairmoo {

namespace {

struct Layout {
    const double* W1;
    const double* b1;
    const double* w2;
    const double* b2;
};

Layout decode(const NetSpec& net, const double* w) {
    Layout L;
    L.W1 = w;
    L.b1 = w + net.hidden * net.input_dim;
    L.w2 = L.b1 + net.hidden;
    L.b2 = L.w2 + net.hidden;
    return L;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Fills z1 and h (each `hidden` wide); returns the clamped probability.
double forward_into(const NetSpec& net, const Layout& L, const double* x, double* z1, double* h) {
    const auto& K = kern::active();
    for (std::size_t u = 0; u < net.hidden; ++u) {
        z1[u] = K.dot(L.W1 + u * net.input_dim, x, net.input_dim) + L.b1[u];
    }
    if (net.activation == Activation::relu) {
        std::copy(z1, z1 + net.hidden, h);
        K.relu(h, net.hidden);
    } else {
        for (std::size_t u = 0; u < net.hidden; ++u) h[u] = std::tanh(z1[u]);
    }
    const double z2 = K.dot(L.w2, h, net.hidden) + *L.b2;
    return std::clamp(sigmoid(z2), kProbClamp, 1.0 - kProbClamp);
}

void check_inputs(const NetSpec& net, const Genome& g, const Dataset& batch,
                  const GroupPartition& part, Metric loss, double alpha) {
    net.validate();
    if (!metric_is_loss(loss)) {
        throw ConfigError("'" + metric_name(loss) + "' is not a differentiable loss");
    }
    if (g.weights.size() != net.genome_length()) {
        throw DataError("genome length " + std::to_string(g.weights.size()) + " does not match net (" +
                        std::to_string(net.genome_length()) + ")");
    }
    if (batch.n == 0) throw DataError("empty batch");
    if (batch.dim != net.input_dim) throw DataError("feature width does not match net input_dim");
    if (loss != Metric::CE && (alpha == 0.0 || alpha == 1.0)) {
        throw DomainError("entropy alpha must avoid 0 and 1");
    }
    if (loss == Metric::FG && part.size() != batch.n) {
        throw DataError("group partition does not cover the batch");
    }
}

// Between-group entropy over whichever groups appear in gof; absent groups
// contribute nothing, which keeps mini-batch training well defined.
double present_group_entropy(const std::vector<double>& b, const std::size_t* gof,
                             std::size_t gcount, double alpha) {
    const auto n = static_cast<double>(b.size());
    std::vector<double> gsum(gcount, 0.0);
    std::vector<std::size_t> gcnt(gcount, 0);
    double mu = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        gsum[gof[i]] += b[i];
        ++gcnt[gof[i]];
        mu += b[i];
    }
    mu /= n;
    double acc = 0.0;
    for (std::size_t g = 0; g < gcount; ++g) {
        if (gcnt[g] == 0) continue;
        const double mug = gsum[g] / static_cast<double>(gcnt[g]);
        acc += static_cast<double>(gcnt[g]) * (std::pow(mug / mu, alpha) - 1.0);
    }
    return acc / (n * alpha * (alpha - 1.0));
}

// Adds d(loss)/d(genome) over the rows ds[idx[0..m)] onto grad. The
// derivative through the output clamp is taken as zero, matching the flat
// loss there.
void accumulate_gradient(const NetSpec& net, const Layout& L, const Dataset& ds,
                         const std::vector<std::size_t>& group_of, std::size_t group_count,
                         const std::size_t* idx, std::size_t m, Metric loss, double alpha,
                         double* grad) {
    const auto& K = kern::active();
    const std::size_t H = net.hidden;
    const std::size_t D = net.input_dim;
    const auto n = static_cast<double>(m);

    std::vector<double> z1(m * H), h(m * H), p(m), dpdz(m);
    for (std::size_t k = 0; k < m; ++k) {
        p[k] = forward_into(net, L, ds.row(idx[k]), &z1[k * H], &h[k * H]);
        const bool clamped = p[k] <= kProbClamp || p[k] >= 1.0 - kProbClamp;
        dpdz[k] = clamped ? 0.0 : p[k] * (1.0 - p[k]);
    }

    std::vector<double> dLdp(m);
    if (loss == Metric::CE) {
        for (std::size_t k = 0; k < m; ++k) {
            dLdp[k] = ds.labels[idx[k]] == 1 ? -1.0 / (n * p[k]) : 1.0 / (n * (1.0 - p[k]));
        }
    } else {
        std::vector<double> b(m);
        double mu = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            b[k] = p[k] - static_cast<double>(ds.labels[idx[k]]) + 1.0;
            mu += b[k];
        }
        mu /= n;
        const double scale = 1.0 / (n * (alpha - 1.0) * mu);  // C * alpha / mu
        if (loss == Metric::FI) {
            double mean_pow = 0.0;
            for (std::size_t k = 0; k < m; ++k) mean_pow += std::pow(b[k] / mu, alpha);
            mean_pow /= n;
            for (std::size_t k = 0; k < m; ++k) {
                dLdp[k] = scale * (std::pow(b[k] / mu, alpha - 1.0) - mean_pow);
            }
        } else {
            std::vector<double> gsum(group_count, 0.0);
            std::vector<std::size_t> gcnt(group_count, 0);
            for (std::size_t k = 0; k < m; ++k) {
                gsum[group_of[idx[k]]] += b[k];
                ++gcnt[group_of[idx[k]]];
            }
            std::vector<double> gpow(group_count, 0.0);
            double mean_pow = 0.0;
            for (std::size_t g = 0; g < group_count; ++g) {
                if (gcnt[g] == 0) continue;
                const double mug = gsum[g] / static_cast<double>(gcnt[g]);
                gpow[g] = std::pow(mug / mu, alpha - 1.0);
                mean_pow += static_cast<double>(gcnt[g]) * std::pow(mug / mu, alpha);
            }
            mean_pow /= n;
            for (std::size_t k = 0; k < m; ++k) {
                dLdp[k] = scale * (gpow[group_of[idx[k]]] - mean_pow);
            }
        }
    }

    const std::size_t w1n = H * D;
    double* gW1 = grad;
    double* gb1 = grad + w1n;
    double* gw2 = gb1 + H;
    double* gb2 = gw2 + H;
    std::vector<double> dz1(H);
    for (std::size_t k = 0; k < m; ++k) {
        const double s = dLdp[k] * dpdz[k];
        if (s == 0.0) continue;
        *gb2 += s;
        K.axpy(s, &h[k * H], gw2, H);
        if (net.activation == Activation::relu) {
            for (std::size_t u = 0; u < H; ++u) dz1[u] = s * L.w2[u];
            K.relu_mask(&z1[k * H], dz1.data(), H);
        } else {
            for (std::size_t u = 0; u < H; ++u) {
                const double t = h[k * H + u];
                dz1[u] = s * L.w2[u] * (1.0 - t * t);
            }
        }
        const double* x = ds.row(idx[k]);
        for (std::size_t u = 0; u < H; ++u) {
            if (dz1[u] == 0.0) continue;
            K.axpy(dz1[u], x, gW1 + u * D, D);
            gb1[u] += dz1[u];
        }
    }
}

}  // namespace

void NetSpec::validate() const {
    if (input_dim < 1) throw ConfigError("net input_dim must be >= 1");
    if (hidden < 1) throw ConfigError("net hidden must be >= 1");
}

void TrainSpec::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be finite and >= 0");
    }
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!metric_is_loss(loss)) {
        throw ConfigError("'" + metric_name(loss) + "' is not a differentiable loss");
    }
    if (loss != Metric::CE && (alpha == 0.0 || alpha == 1.0)) {
        throw ConfigError("entropy alpha must avoid 0 and 1");
    }
}

Genome init_genome(const NetSpec& net, std::uint64_t seed) {
    net.validate();
    Rng rng(seed);
    Genome g;
    g.weights.assign(net.genome_length(), 0.0);
    const double bound1 = std::sqrt(6.0 / static_cast<double>(net.input_dim + net.hidden));
    const double bound2 = std::sqrt(6.0 / static_cast<double>(net.hidden + 1));
    for (std::size_t i = 0; i < net.hidden * net.input_dim; ++i) {
        g.weights[i] = rng.uniform(-bound1, bound1);
    }
    double* w2 = g.weights.data() + net.hidden * (net.input_dim + 1);
    for (std::size_t u = 0; u < net.hidden; ++u) w2[u] = rng.uniform(-bound2, bound2);
    return g;
}

double forward(const NetSpec& net, const Genome& g, const double* x, std::size_t dim) {
    net.validate();
    if (dim != net.input_dim) throw DataError("feature width does not match net input_dim");
    if (g.weights.size() != net.genome_length()) throw DataError("genome length mismatch");
    std::vector<double> z1(net.hidden), h(net.hidden);
    return forward_into(net, decode(net, g.weights.data()), x, z1.data(), h.data());
}

double forward(const NetSpec& net, const Genome& g, const std::vector<double>& x) {
    return forward(net, g, x.data(), x.size());
}

std::vector<double> forward_batch(const NetSpec& net, const Genome& g, const Dataset& ds) {
    net.validate();
    if (ds.dim != net.input_dim) throw DataError("feature width does not match net input_dim");
    if (g.weights.size() != net.genome_length()) throw DataError("genome length mismatch");
    const Layout L = decode(net, g.weights.data());
    std::vector<double> z1(net.hidden), h(net.hidden), out(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        out[i] = forward_into(net, L, ds.row(i), z1.data(), h.data());
    }
    return out;
}

double loss_value(const NetSpec& net, const Genome& g, const Dataset& batch,
                  const GroupPartition& part, Metric loss, double alpha) {
    check_inputs(net, g, batch, part, loss, alpha);
    const std::vector<double> probs = forward_batch(net, g, batch);
    if (loss == Metric::CE) return cross_entropy(probs, batch.labels);
    const std::vector<double> b = benefit_vector(probs, batch.labels);
    if (loss == Metric::FI) return generalized_entropy(b, alpha);
    return present_group_entropy(b, part.group_of.data(), part.group_count(), alpha);
}

std::vector<double> loss_gradient(const NetSpec& net, const Genome& g, const Dataset& batch,
                                  const GroupPartition& part, Metric loss, double alpha) {
    check_inputs(net, g, batch, part, loss, alpha);
    std::vector<std::size_t> idx(batch.n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> grad(net.genome_length(), 0.0);
    accumulate_gradient(net, decode(net, g.weights.data()), batch, part.group_of,
                        part.group_count(), idx.data(), idx.size(), loss, alpha, grad.data());
    return grad;
}

Genome partial_train(const NetSpec& net, const Genome& g0, const Dataset& train,
                     const GroupPartition& part, const TrainSpec& ts) {
    ts.validate();
    check_inputs(net, g0, train, part, ts.loss, ts.alpha);
    Genome g = g0;
    if (ts.learning_rate == 0.0 || ts.epochs == 0) return g;

    const auto& K = kern::active();
    Rng rng(ts.seed);
    std::vector<std::size_t> order(train.n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(g.weights.size());
    for (std::size_t e = 0; e < ts.epochs; ++e) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < train.n; start += ts.batch_size) {
            const std::size_t m = std::min(train.n - start, ts.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            accumulate_gradient(net, decode(net, g.weights.data()), train, part.group_of,
                                part.group_count(), order.data() + start, m, ts.loss, ts.alpha,
                                grad.data());
            for (double v : grad) {
                if (!std::isfinite(v)) {
                    throw TrainingError("non-finite gradient on loss " + metric_name(ts.loss) +
                                        " (epoch " + std::to_string(e) + ", offset " +
                                        std::to_string(start) + ")");
                }
            }
            K.axpy(-ts.learning_rate, grad.data(), g.weights.data(), g.weights.size());
        }
    }
    for (double v : g.weights) {
        if (!std::isfinite(v)) throw TrainingError("weights diverged during partial training");
    }
    return g;
}

}  // namespace fairmoo
