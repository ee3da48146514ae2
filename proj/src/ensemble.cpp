#include "fairmoo/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairmoo/errors.hpp"
#include "fairmoo/fairmetrics.hpp"

namespace fairmoo {

namespace {

const std::array<std::string, 4> kStrategyNames = {"EnsAll", "EnsBest", "EnsKnee", "EnsDiv"};

std::vector<std::vector<double>> normalize_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t m = rows.front().size();
    std::vector<double> lo(m, std::numeric_limits<double>::infinity());
    std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < m; ++k) {
            lo[k] = std::min(lo[k], r[k]);
            hi[k] = std::max(hi[k], r[k]);
        }
    }
    std::vector<std::vector<double>> out(rows.size(), std::vector<double>(m));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const double width = hi[k] - lo[k];
            out[i][k] = width > 0.0 ? (rows[i][k] - lo[k]) / width : 0.0;
        }
    }
    return out;
}

// Gaussian elimination with partial pivoting; false on a singular system.
bool solve_linear(std::vector<std::vector<double>> A, std::vector<double> rhs,
                  std::vector<double>& w) {
    const std::size_t m = rhs.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        }
        if (std::abs(A[pivot][col]) < 1e-12) return false;
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < m; ++c) A[r][c] -= f * A[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    w.assign(m, 0.0);
    for (std::size_t col = m; col-- > 0;) {
        double acc = rhs[col];
        for (std::size_t c = col + 1; c < m; ++c) acc -= A[col][c] * w[c];
        w[col] = acc / A[col][col];
    }
    return true;
}

// Knee ordering over the nondominated rows: non-extreme members by distance
// below the hyperplane through the per-objective extreme points (largest
// bulge first, ties by lower CE then index); the anchoring extreme points
// themselves come last.
std::vector<std::size_t> knee_order(const std::vector<std::vector<double>>& norm,
                                    const std::vector<double>& ce) {
    const std::size_t n = norm.size();
    const std::size_t m = norm.front().size();

    std::vector<std::size_t> extreme;
    std::vector<char> is_extreme(n, 0);
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (norm[i][k] < norm[best][k]) best = i;
        }
        if (!is_extreme[best]) {
            is_extreme[best] = 1;
            extreme.push_back(best);
        }
    }

    std::vector<std::vector<double>> E;
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (norm[i][k] < norm[best][k]) best = i;
        }
        E.push_back(norm[best]);
    }
    std::vector<double> w;
    const bool plane_ok = solve_linear(E, std::vector<double>(m, 1.0), w);
    double wnorm = 0.0;
    if (plane_ok) {
        for (double v : w) wnorm += v * v;
        wnorm = std::sqrt(wnorm);
    }

    // Degenerate extreme geometry: order by coordinate sum instead, which
    // keeps "closer to the origin" first.
    auto score = [&](std::size_t i) {
        double dot = 0.0;
        for (std::size_t k = 0; k < m; ++k) dot += (plane_ok ? w[k] : 1.0) * norm[i][k];
        return plane_ok ? (1.0 - dot) / wnorm : -dot;
    };

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_extreme[i]) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = score(a), sb = score(b);
        if (sa != sb) return sa > sb;
        if (ce[a] != ce[b]) return ce[a] < ce[b];
        return a < b;
    });
    order.insert(order.end(), extreme.begin(), extreme.end());
    return order;
}

// Iterated removal of the most crowded member under the L_{1/m} quasi-norm,
// the two nearest neighbors breaking ties, until e remain.
std::vector<std::size_t> diverse_keep(const std::vector<std::vector<double>>& norm,
                                      std::size_t e) {
    const std::size_t n = norm.size();
    const std::size_t m = norm.front().size();
    const double p = 1.0 / static_cast<double>(m);
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += std::pow(std::abs(norm[i][k] - norm[j][k]), p);
            dist[i][j] = dist[j][i] = std::pow(acc, 1.0 / p);
        }
    }

    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0);
    while (remaining.size() > e) {
        std::size_t victim = 0;
        std::pair<double, double> victim_nn{0.0, 0.0};
        for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
            double nn1 = std::numeric_limits<double>::infinity();
            double nn2 = std::numeric_limits<double>::infinity();
            for (std::size_t other : remaining) {
                if (other == remaining[pos]) continue;
                const double d = dist[remaining[pos]][other];
                if (d < nn1) {
                    nn2 = nn1;
                    nn1 = d;
                } else if (d < nn2) {
                    nn2 = d;
                }
            }
            const std::pair<double, double> nn{nn1, nn2};
            if (pos == 0 || nn < victim_nn) {
                victim = pos;
                victim_nn = nn;
            }
        }
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    return remaining;
}

}  // namespace

const std::string& ensemble_strategy_name(EnsembleStrategy s) {
    return kStrategyNames[static_cast<std::size_t>(s)];
}

EnsembleStrategy ensemble_strategy_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
        if (kStrategyNames[i] == name) return static_cast<EnsembleStrategy>(i);
    }
    throw ConfigError("unknown ensemble strategy '" + name + "'");
}

void EnsembleSpec::validate() const {
    if (criteria.empty()) throw ConfigError("ensemble criteria list is empty");
    if (alpha == 0.0 || alpha == 1.0) throw ConfigError("entropy alpha must avoid 0 and 1");
    if ((strategy == EnsembleStrategy::knee || strategy == EnsembleStrategy::diverse) &&
        target_size < 1) {
        throw ConfigError("ensemble target size must be >= 1");
    }
}

std::vector<std::size_t> select_indices(const std::vector<std::vector<double>>& objs,
                                        EnsembleStrategy strategy, std::size_t e,
                                        std::size_t ce_index) {
    const auto nd = nondominated_set(objs);
    if (strategy == EnsembleStrategy::all) return nd;

    if (strategy == EnsembleStrategy::best) {
        std::vector<std::size_t> chosen;
        for (std::size_t k = 0; k < objs.front().size(); ++k) {
            std::size_t best = nd.front();
            for (std::size_t idx : nd) {
                if (objs[idx][k] < objs[best][k]) best = idx;
            }
            chosen.push_back(best);
        }
        std::sort(chosen.begin(), chosen.end());
        chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
        return chosen;
    }

    if (e >= nd.size()) {
        if (e > nd.size()) {
            warn("requested ensemble size " + std::to_string(e) + " exceeds the " +
                 std::to_string(nd.size()) + " nondominated models; returning all of them");
        }
        return nd;
    }

    std::vector<std::vector<double>> nd_rows;
    nd_rows.reserve(nd.size());
    for (std::size_t idx : nd) nd_rows.push_back(objs[idx]);
    const auto norm = normalize_rows(nd_rows);

    std::vector<std::size_t> keep_pos;
    if (strategy == EnsembleStrategy::knee) {
        std::vector<double> ce(nd.size(), 0.0);
        if (ce_index != static_cast<std::size_t>(-1)) {
            for (std::size_t i = 0; i < nd.size(); ++i) ce[i] = objs[nd[i]][ce_index];
        }
        const auto order = knee_order(norm, ce);
        keep_pos.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(e));
    } else {
        keep_pos = diverse_keep(norm, e);
    }

    std::vector<std::size_t> out;
    out.reserve(keep_pos.size());
    for (std::size_t pos : keep_pos) out.push_back(nd[pos]);
    std::sort(out.begin(), out.end());
    return out;
}

Ensemble select(const Population& pop, const NetSpec& net, const Dataset& ens_data,
                const GroupPartition& part, const EnsembleSpec& spec) {
    spec.validate();
    if (pop.empty()) throw SelectionError("cannot build an ensemble from an empty population");
    const GroupPartition cpart = part.compact();
    std::vector<std::vector<double>> rows;
    rows.reserve(pop.size());
    for (const auto& ind : pop) {
        rows.push_back(evaluate(net, ind.genome, ens_data, cpart, spec.criteria, spec.alpha));
    }
    const auto ce_it = std::find(spec.criteria.begin(), spec.criteria.end(), Metric::CE);
    const std::size_t ce_pos = ce_it == spec.criteria.end()
                                   ? static_cast<std::size_t>(-1)
                                   : static_cast<std::size_t>(ce_it - spec.criteria.begin());
    Ensemble ens;
    ens.net = net;
    for (std::size_t idx : select_indices(rows, spec.strategy, spec.target_size, ce_pos)) {
        ens.members.push_back(pop[idx].genome);
    }
    return ens;
}

double predict(const Ensemble& ens, const double* x, std::size_t dim) {
    if (ens.members.empty()) throw DataError("empty ensemble");
    double acc = 0.0;
    for (const auto& g : ens.members) acc += forward(ens.net, g, x, dim);
    return acc / static_cast<double>(ens.members.size());
}

double predict(const Ensemble& ens, const std::vector<double>& x) {
    return predict(ens, x.data(), x.size());
}

std::vector<double> predict_batch(const Ensemble& ens, const Dataset& ds) {
    if (ens.members.empty()) throw DataError("empty ensemble");
    std::vector<double> out(ds.n, 0.0);
    for (const auto& g : ens.members) {
        const auto probs = forward_batch(ens.net, g, ds);
        for (std::size_t i = 0; i < ds.n; ++i) out[i] += probs[i];
    }
    for (double& v : out) v /= static_cast<double>(ens.members.size());
    return out;
}

std::vector<double> evaluate_ensemble(const Ensemble& ens, const Dataset& test,
                                      const GroupPartition& part,
                                      const std::vector<Metric>& criteria, double alpha) {
    return evaluate_probs(predict_batch(ens, test), test.labels, part.compact(), criteria, alpha);
}

}  // namespace fairmoo
