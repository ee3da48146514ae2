#include "fairmoo/fairmetrics.hpp"

#include <algorithm>
#include <cmath>

#include "fairmoo/errors.hpp"

namespace fairmoo {

namespace {

// A conditional rate and whether its denominator was nonzero.
struct Rate {
    double v = 0.0;
    bool ok = false;
};

Rate rate(std::size_t num, std::size_t den) {
    if (den == 0) return {};
    return {static_cast<double>(num) / static_cast<double>(den), true};
}

// Undefined-side policy: both sides undefined means no evidence of
// disparity (0); only one side undefined counts as maximal disparity (1).
double diff_pair(Rate a, Rate b) {
    if (!a.ok && !b.ok) return 0.0;
    if (!a.ok || !b.ok) return 1.0;
    return std::abs(a.v - b.v);
}

double ratio_pair(Rate a, Rate b) {
    if (!a.ok && !b.ok) return 0.0;
    if (!a.ok || !b.ok) return 1.0;
    if (a.v == 0.0 && b.v == 0.0) return 0.0;
    if (a.v == 0.0 || b.v == 0.0) return 1.0;
    const double r = a.v / b.v;
    return 1.0 - std::min(r, 1.0 / r);
}

Rate tpr(const SideCounts& s) { return rate(s.tp, s.tp + s.fn); }
Rate fpr(const SideCounts& s) { return rate(s.fp, s.fp + s.tn); }
Rate fnr(const SideCounts& s) { return rate(s.fn, s.tp + s.fn); }
Rate ppv(const SideCounts& s) { return rate(s.tp, s.tp + s.fp); }
Rate fdr(const SideCounts& s) { return rate(s.fp, s.tp + s.fp); }
Rate fom(const SideCounts& s) { return rate(s.fn, s.tn + s.fn); }  // false omission
Rate pos(const SideCounts& s) { return rate(s.tp + s.fp, s.total()); }
Rate err(const SideCounts& s) { return rate(s.fp + s.fn, s.total()); }

}  // namespace

std::vector<double> benefit_vector(const std::vector<double>& probs,
                                   const std::vector<int>& labels) {
    if (probs.size() != labels.size()) throw DataError("probs/labels length mismatch");
    std::vector<double> b(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        b[i] = probs[i] - static_cast<double>(labels[i]) + 1.0;
    }
    return b;
}

double generalized_entropy(const std::vector<double>& b, double alpha) {
    if (b.empty()) throw DataError("empty benefit vector");
    if (alpha == 0.0 || alpha == 1.0) throw DomainError("entropy alpha must avoid 0 and 1");
    const auto n = static_cast<double>(b.size());
    double mu = 0.0;
    for (double v : b) {
        if (!(v > 0.0)) throw DomainError("benefits must be positive");
        mu += v;
    }
    mu /= n;
    double acc = 0.0;
    for (double v : b) acc += std::pow(v / mu, alpha) - 1.0;
    return acc / (n * alpha * (alpha - 1.0));
}

double group_entropy(const std::vector<double>& b, const GroupPartition& part, double alpha) {
    if (b.empty()) throw DataError("empty benefit vector");
    if (b.size() != part.size()) throw DataError("benefit/partition length mismatch");
    if (alpha == 0.0 || alpha == 1.0) throw DomainError("entropy alpha must avoid 0 and 1");
    const auto n = static_cast<double>(b.size());
    const std::size_t gcount = part.group_count();
    std::vector<double> gsum(gcount, 0.0);
    std::vector<std::size_t> gcnt(gcount, 0);
    double mu = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(b[i] > 0.0)) throw DomainError("benefits must be positive");
        gsum[part.group_of[i]] += b[i];
        ++gcnt[part.group_of[i]];
        mu += b[i];
    }
    mu /= n;
    double acc = 0.0;
    for (std::size_t g = 0; g < gcount; ++g) {
        if (gcnt[g] == 0) {
            const std::string name =
                g < part.group_names.size() ? part.group_names[g] : std::to_string(g);
            throw DomainError("group '" + name + "' has no members; compact the partition");
        }
        const double mug = gsum[g] / static_cast<double>(gcnt[g]);
        acc += static_cast<double>(gcnt[g]) * (std::pow(mug / mu, alpha) - 1.0);
    }
    return acc / (n * alpha * (alpha - 1.0));
}

GroupConfusion confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                         const GroupPartition& part) {
    if (preds.size() != labels.size() || preds.size() != part.size()) {
        throw DataError("confusion input length mismatch");
    }
    if (part.privileged.size() != part.group_count()) {
        throw DataError("partition lacks privileged flags");
    }
    GroupConfusion c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if ((preds[i] != 0 && preds[i] != 1) || (labels[i] != 0 && labels[i] != 1)) {
            throw DataError("confusion expects binary predictions and labels");
        }
        SideCounts& s = part.privileged[part.group_of[i]] ? c.g1 : c.g2;
        if (preds[i] == 1) {
            labels[i] == 1 ? ++s.tp : ++s.fp;
        } else {
            labels[i] == 1 ? ++s.fn : ++s.tn;
        }
    }
    return c;
}

double fairness_metric(Metric id, const GroupConfusion& c) {
    const SideCounts& a = c.g1;
    const SideCounts& b = c.g2;
    switch (id) {
        case Metric::Fair1: {
            // Signed differences first, absolute value over the mean.
            const Rate f1 = fpr(a), f2 = fpr(b), t1 = tpr(a), t2 = tpr(b);
            if (f1.ok && f2.ok && t1.ok && t2.ok) {
                return 0.5 * std::abs((f1.v - f2.v) + (t1.v - t2.v));
            }
            return 0.5 * (diff_pair(f1, f2) + diff_pair(t1, t2));
        }
        case Metric::Fair2:
            return diff_pair(err(a), err(b));
        case Metric::Fair3:
            return ratio_pair(fdr(a), fdr(b));
        case Metric::Fair4:
            return diff_pair(fpr(a), fpr(b));
        case Metric::Fair5:
            return diff_pair(fom(a), fom(b));
        case Metric::Fair6:
            return ratio_pair(fom(a), fom(b));
        case Metric::Fair7:
            return diff_pair(fnr(a), fnr(b));
        case Metric::Fair8:
            return ratio_pair(fnr(a), fnr(b));
        case Metric::Fair9:
            return ratio_pair(err(a), err(b));
        case Metric::Fair10:
            return diff_pair(fdr(a), fdr(b));
        case Metric::Fair11:
            return ratio_pair(fpr(a), fpr(b));
        case Metric::Fair12:
            return ratio_pair(pos(a), pos(b));
        case Metric::Fair13:
            return diff_pair(pos(a), pos(b));
        case Metric::Fair14:
            return diff_pair(tpr(a), tpr(b));
        case Metric::Fair15:
            return 0.5 * (diff_pair(fpr(a), fpr(b)) + diff_pair(tpr(a), tpr(b)));
        case Metric::Fair16:
            return diff_pair(ppv(a), ppv(b));
        default:
            throw ConfigError("'" + metric_name(id) + "' is not a confusion-matrix metric");
    }
}

double cross_entropy(const std::vector<double>& probs, const std::vector<int>& labels) {
    if (probs.size() != labels.size()) throw DataError("probs/labels length mismatch");
    if (probs.empty()) throw DataError("empty batch");
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = std::clamp(probs[i], kProbClamp, 1.0 - kProbClamp);
        acc += labels[i] == 1 ? -std::log(p) : -std::log1p(-p);
    }
    return acc / static_cast<double>(probs.size());
}

std::vector<int> threshold_preds(const std::vector<double>& probs) {
    std::vector<int> preds(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) preds[i] = probs[i] >= 0.5 ? 1 : 0;
    return preds;
}

std::vector<double> evaluate_probs(const std::vector<double>& probs,
                                   const std::vector<int>& labels,
                                   const GroupPartition& part,
                                   const std::vector<Metric>& criteria, double alpha) {
    if (criteria.empty()) throw ConfigError("criteria list is empty");
    if (probs.size() != labels.size()) throw DataError("probs/labels length mismatch");
    if (probs.empty()) throw DataError("empty evaluation batch");

    bool need_conf = false, need_benefit = false, need_preds = false;
    for (Metric m : criteria) {
        need_conf = need_conf || (m >= Metric::Fair1 && m <= Metric::Fair16);
        need_benefit = need_benefit || m == Metric::FI || m == Metric::FG;
        need_preds = need_preds || m == Metric::ACC;
    }

    std::vector<int> preds;
    if (need_conf || need_preds) preds = threshold_preds(probs);
    GroupConfusion conf;
    if (need_conf) conf = confusion(preds, labels, part);
    std::vector<double> b;
    if (need_benefit) b = benefit_vector(probs, labels);

    std::vector<double> out;
    out.reserve(criteria.size());
    for (Metric m : criteria) {
        switch (m) {
            case Metric::CE:
                out.push_back(cross_entropy(probs, labels));
                break;
            case Metric::ACC: {
                std::size_t correct = 0;
                for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == labels[i];
                out.push_back(1.0 - static_cast<double>(correct) / static_cast<double>(preds.size()));
                break;
            }
            case Metric::FI:
                out.push_back(generalized_entropy(b, alpha));
                break;
            case Metric::FG:
                out.push_back(group_entropy(b, part, alpha));
                break;
            default:
                out.push_back(fairness_metric(m, conf));
        }
    }
    return out;
}

std::vector<double> evaluate(const NetSpec& net, const Genome& g, const Dataset& ds,
                             const GroupPartition& part, const std::vector<Metric>& criteria,
                             double alpha) {
    return evaluate_probs(forward_batch(net, g, ds), ds.labels, part, criteria, alpha);
}

}  // namespace fairmoo
