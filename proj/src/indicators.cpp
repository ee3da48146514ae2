#include "fairmoo/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "fairmoo/errors.hpp"
#include "fairmoo/moea.hpp"
#include "fairmoo/rng.hpp"

namespace fairmoo {

namespace {

void check_rows(const std::vector<std::vector<double>>& rows, std::size_t dims,
                const char* what) {
    for (const auto& r : rows) {
        if (r.size() != dims)
            throw DataError(std::string(what) + ": objective width mismatch");
        for (double v : r)
            if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite value");
    }
}

double box_volume(const std::vector<double>& p) {
    double v = 1.0;
    for (double c : p) v *= kHvReference - c;
    return v;
}

// Area swept from right to left; nondominated 2-D points sorted by the
// first coordinate have strictly decreasing second coordinates.
double hv2d(std::vector<std::vector<double>> ps) {
    std::sort(ps.begin(), ps.end());
    double area = 0.0, prev = kHvReference;
    for (const auto& p : ps) {
        area += (kHvReference - p[0]) * (prev - p[1]);
        prev = p[1];
    }
    return area;
}

std::vector<std::vector<double>> nd_rows(std::vector<std::vector<double>> ps) {
    auto keep = nondominated_set(ps);
    std::vector<std::vector<double>> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(std::move(ps[i]));
    return out;
}

// Exclusive-contribution recursion: hv(S) = sum_i inclhv(p_i) - hv(L_i)
// where L_i raises every later point to at least p_i componentwise, so the
// subtracted term is exactly the part of p_i's box the rest also covers.
double wfg_hv(std::vector<std::vector<double>> ps) {
    ps = nd_rows(std::move(ps));
    if (ps.empty()) return 0.0;
    if (ps.size() == 1) return box_volume(ps[0]);
    if (ps[0].size() == 2) return hv2d(std::move(ps));
    std::sort(ps.begin(), ps.end(), std::greater<>());
    double total = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        std::vector<std::vector<double>> limited;
        limited.reserve(ps.size() - i - 1);
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            std::vector<double> q(ps[j].size());
            for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::max(ps[j][k], ps[i][k]);
            limited.push_back(std::move(q));
        }
        total += box_volume(ps[i]) - (limited.empty() ? 0.0 : wfg_hv(std::move(limited)));
    }
    return total;
}

// Drops points with no positive-volume box to the reference; warns only
// when a coordinate lies strictly past it (clipping lands exactly on it).
std::vector<std::vector<double>> inside_reference(const std::vector<std::vector<double>>& ps) {
    std::vector<std::vector<double>> out;
    out.reserve(ps.size());
    for (const auto& p : ps) {
        bool degenerate = false, beyond = false;
        for (double c : p) {
            if (c < 0.0) throw DataError("hypervolume: negative coordinate, normalize first");
            if (c >= kHvReference) degenerate = true;
            if (c > kHvReference) beyond = true;
        }
        if (beyond) warn("hypervolume: point beyond reference contributes zero");
        if (!degenerate) out.push_back(p);
    }
    return out;
}

std::size_t hv_dims(const std::vector<std::vector<double>>& points, const char* what) {
    if (points.empty()) return 0;
    std::size_t m = points[0].size();
    if (m < 2) throw ConfigError(std::string(what) + ": needs at least two objectives");
    check_rows(points, m, what);
    return m;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

PseudoFront build_pseudo_front(const std::vector<std::vector<std::vector<double>>>& runs) {
    std::vector<std::vector<double>> pool;
    for (const auto& run : runs) pool.insert(pool.end(), run.begin(), run.end());
    if (pool.empty()) throw DataError("build_pseudo_front: no points supplied");
    std::size_t m = pool[0].size();
    if (m == 0) throw DataError("build_pseudo_front: zero-width objectives");
    check_rows(pool, m, "build_pseudo_front");

    PseudoFront front;
    front.points = nd_rows(std::move(pool));
    front.ideal.assign(m, std::numeric_limits<double>::infinity());
    front.nadir.assign(m, -std::numeric_limits<double>::infinity());
    for (const auto& p : front.points)
        for (std::size_t k = 0; k < m; ++k) {
            front.ideal[k] = std::min(front.ideal[k], p[k]);
            front.nadir[k] = std::max(front.nadir[k], p[k]);
        }
    front.degenerate.assign(m, 0);
    for (std::size_t k = 0; k < m; ++k)
        if (front.nadir[k] <= front.ideal[k]) {
            front.degenerate[k] = 1;
            warn("build_pseudo_front: objective " + std::to_string(k) +
                 " has zero spread, unit width substituted");
        }
    return front;
}

std::vector<std::vector<double>> normalize(const std::vector<std::vector<double>>& points,
                                           const PseudoFront& front) {
    std::size_t m = front.dims();
    check_rows(points, m, "normalize");
    std::vector<std::vector<double>> out(points.size(), std::vector<double>(m));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t k = 0; k < m; ++k) {
            double width = front.degenerate[k] ? 1.0 : front.nadir[k] - front.ideal[k];
            double v = (points[i][k] - front.ideal[k]) / width;
            out[i][k] = std::clamp(v, 0.0, kHvReference);
        }
    return out;
}

double hypervolume_exact(const std::vector<std::vector<double>>& points) {
    hv_dims(points, "hypervolume");
    auto inside = inside_reference(points);
    return inside.empty() ? 0.0 : wfg_hv(std::move(inside));
}

HvEstimate hypervolume_mc(const std::vector<std::vector<double>>& points, std::size_t samples,
                          std::uint64_t seed) {
    std::size_t m = hv_dims(points, "hypervolume");
    if (samples == 0) throw ConfigError("hypervolume: sample count must be positive");
    auto inside = nd_rows(inside_reference(points));
    if (inside.empty()) return {0.0, 0.0, false};

    Rng rng(seed);
    std::vector<double> u(m);
    std::size_t hit = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t k = 0; k < m; ++k) u[k] = rng.uniform(0.0, kHvReference);
        for (const auto& p : inside) {
            bool covers = true;
            for (std::size_t k = 0; k < m; ++k)
                if (p[k] > u[k]) {
                    covers = false;
                    break;
                }
            if (covers) {
                ++hit;
                break;
            }
        }
    }
    double cube = std::pow(kHvReference, static_cast<double>(m));
    double frac = static_cast<double>(hit) / static_cast<double>(samples);
    double se = cube * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
    return {cube * frac, se, false};
}

HvEstimate hypervolume(const std::vector<std::vector<double>>& points) {
    std::size_t m = hv_dims(points, "hypervolume");
    if (m == 0) return {0.0, 0.0, true};
    if (m <= 4) return {hypervolume_exact(points), 0.0, true};
    return hypervolume_mc(points, 1'000'000, 0x9e3779b97f4a7c15ULL);
}

double cpf(const std::vector<std::vector<double>>& points, const PseudoFront& front,
           std::size_t front_samples, std::uint64_t seed) {
    if (points.empty()) throw DataError("cpf: empty point set");
    if (front.points.empty()) throw DataError("cpf: empty front");
    if (front_samples == 0) throw ConfigError("cpf: sample count must be positive");
    auto set_n = normalize(points, front);
    auto front_n = normalize(front.points, front);

    if (front_n.size() > front_samples) {
        std::vector<std::size_t> idx(front_n.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Rng rng(seed);
        rng.shuffle(idx);
        idx.resize(front_samples);
        std::vector<std::vector<double>> sampled;
        sampled.reserve(front_samples);
        for (std::size_t i : idx) sampled.push_back(std::move(front_n[i]));
        front_n = std::move(sampled);
    }

    // Resolution: the front's own largest gap to a distinct neighbor. Any
    // coarser and the front could not certify its own coverage.
    double theta_sq = 0.0;
    bool spread = false;
    for (std::size_t i = 0; i < front_n.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < front_n.size(); ++j) {
            if (j == i) continue;
            double d = sq_dist(front_n[i], front_n[j]);
            if (d > 0.0) best = std::min(best, d);
        }
        if (std::isfinite(best)) {
            spread = true;
            theta_sq = std::max(theta_sq, best);
        }
    }
    if (!spread) {
        warn("cpf: front has no two distinct points, coverage undefined, scoring 0");
        return 0.0;
    }

    std::size_t covered = 0;
    for (const auto& f : front_n) {
        for (const auto& p : set_n)
            if (sq_dist(p, f) <= theta_sq) {
                ++covered;
                break;
            }
    }
    return static_cast<double>(covered) / static_cast<double>(front_n.size());
}

namespace {

// Validates the archive against s and returns indices of nonempty trials,
// warning about skipped empty ones.
std::vector<std::size_t> usable_trials(const TrialArchive& arch, const char* what) {
    if (arch.s.empty()) throw DataError(std::string(what) + ": empty reference point");
    for (double v : arch.s)
        if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite reference");
    std::vector<std::size_t> use;
    for (std::size_t i = 0; i < arch.trials.size(); ++i) {
        if (arch.trials[i].empty()) {
            warn(std::string(what) + ": trial " + std::to_string(i) + " is empty, skipped");
            continue;
        }
        check_rows(arch.trials[i], arch.s.size(), what);
        use.push_back(i);
    }
    if (use.empty()) throw DataError(std::string(what) + ": no nonempty trials");
    return use;
}

}  // namespace

double dominate_metric(const TrialArchive& arch) {
    auto use = usable_trials(arch, "dominate_metric");
    std::size_t hits = 0;
    for (std::size_t i : use) {
        bool any = false;
        for (const auto& p : arch.trials[i])
            if (dominates(p, arch.s)) {
                any = true;
                break;
            }
        hits += any;
    }
    return static_cast<double>(hits) / static_cast<double>(use.size());
}

double incomparable_metric(const TrialArchive& arch) {
    auto use = usable_trials(arch, "incomparable_metric");
    double total = 0.0;
    for (std::size_t i : use) {
        std::size_t n = 0;
        for (const auto& p : arch.trials[i])
            n += !dominates(p, arch.s) && !dominates(arch.s, p);
        total += static_cast<double>(n) / static_cast<double>(arch.trials[i].size());
    }
    return total / static_cast<double>(use.size());
}

double dominated_metric(const TrialArchive& arch) {
    auto use = usable_trials(arch, "dominated_metric");
    double total = 0.0;
    for (std::size_t i : use) {
        std::size_t n = 0;
        for (const auto& p : arch.trials[i]) n += dominates(arch.s, p);
        total += static_cast<double>(n) / static_cast<double>(arch.trials[i].size());
    }
    return total / static_cast<double>(use.size());
}

double g_mean(const std::vector<double>& values) {
    if (values.empty()) throw DataError("g_mean: empty input");
    double log_sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("g_mean: non-finite value");
        if (v < 0.0) throw DomainError("g_mean: negative value");
        if (v == 0.0) return 0.0;
        log_sum += std::log(v);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

const std::string& verdict_name(RankSumVerdict v) {
    static const std::string names[] = {"better", "similar", "worse"};
    return names[static_cast<int>(v)];
}

RankSumVerdict rank_sum_test(const std::vector<double>& a, const std::vector<double>& b,
                             double alpha_sig, bool larger_is_better) {
    if (a.size() < 3 || b.size() < 3)
        throw DataError("rank_sum_test: need at least 3 observations per sample");
    if (!(alpha_sig > 0.0 && alpha_sig < 1.0))
        throw ConfigError("rank_sum_test: significance level must be in (0, 1)");
    for (double v : a)
        if (!std::isfinite(v)) throw DataError("rank_sum_test: non-finite value");
    for (double v : b)
        if (!std::isfinite(v)) throw DataError("rank_sum_test: non-finite value");

    std::vector<std::pair<double, int>> pooled;  // value, 0 = from a
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end());

    double n = static_cast<double>(pooled.size());
    double rank_a = 0.0, tie_term = 0.0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
        double t = static_cast<double>(j - i);
        double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_a += avg_rank;
        tie_term += t * t * t - t;
        i = j;
    }

    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (variance <= 0.0) {
        warn("rank_sum_test: samples fully tied, reporting similar");
        return RankSumVerdict::similar;
    }

    double u = rank_a - na * (na + 1.0) / 2.0;
    double shift = u - na * nb / 2.0;
    // Continuity correction keeps small-sample verdicts on the tabulated
    // side of the threshold.
    double z = std::max(0.0, std::abs(shift) - 0.5) / std::sqrt(variance);
    double p = std::erfc(z / std::sqrt(2.0));
    if (p >= alpha_sig) return RankSumVerdict::similar;

    double ma = median_of(a), mb = median_of(b);
    bool a_larger = ma != mb ? ma > mb : shift > 0.0;
    return a_larger == larger_is_better ? RankSumVerdict::better : RankSumVerdict::worse;
}

}  // namespace fairmoo
