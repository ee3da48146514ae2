#pragma once

// Set-quality indicators: pooled pseudo-front construction, normalization,
// hypervolume (exact sweep for few objectives, Monte-Carlo beyond),
// front-coverage, per-trial dominance proportions against a reference
// point, the geometric mean, and a rank-sum comparison verdict.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fairmoo {

struct PseudoFront {
    std::vector<std::vector<double>> points;  // mutually nondominated
    std::vector<double> ideal, nadir;         // componentwise min/max of points
    std::vector<char> degenerate;             // dims where ideal == nadir (width 1 used)

    std::size_t dims() const { return ideal.size(); }
};

// Nondominated filter over the pooled union of all runs' objective sets.
PseudoFront build_pseudo_front(const std::vector<std::vector<std::vector<double>>>& runs);

// (v - ideal) / (nadir - ideal) per dimension, clipped into [0, 1.1]; the
// headroom keeps points that fall outside the pooled bounds at zero
// hypervolume contribution instead of negative.
std::vector<std::vector<double>> normalize(const std::vector<std::vector<double>>& points,
                                           const PseudoFront& front);

inline constexpr double kHvReference = 1.1;

struct HvEstimate {
    double value = 0.0;
    double se = 0.0;  // standard error; 0 when exact
    bool exact = true;
};

// Lebesgue measure of the union of boxes [point, (1.1,...,1.1)] over
// normalized points. Points with any coordinate past the reference are
// dropped with a warning. Exact up to 4 objectives, Monte-Carlo with
// >= 1e6 samples beyond.
HvEstimate hypervolume(const std::vector<std::vector<double>>& points);
double hypervolume_exact(const std::vector<std::vector<double>>& points);
HvEstimate hypervolume_mc(const std::vector<std::vector<double>>& points, std::size_t samples,
                          std::uint64_t seed);

// Fraction of the front within attainment resolution of the scored set:
// both are normalized by the front's bounds, the front is subsampled to at
// most `front_samples` points (seeded), and a front point counts as covered
// when some scored point lies within the front's own largest
// nearest-neighbor spacing. A front without two distinct points warns and
// scores 0. An approximation of the published coverage construction; values
// are comparable only at matching sample settings.
double cpf(const std::vector<std::vector<double>>& points, const PseudoFront& front,
           std::size_t front_samples = 10000, std::uint64_t seed = 0);

// Per-trial solution sets compared against one reference point s.
struct TrialArchive {
    std::vector<std::vector<std::vector<double>>> trials;
    std::vector<double> s;
};

// Share of trials holding at least one point that dominates s.
double dominate_metric(const TrialArchive& arch);
// Mean within-trial proportion of points neither dominating nor dominated
// by s (equal vectors count as incomparable).
double incomparable_metric(const TrialArchive& arch);
// Mean within-trial proportion of points strictly dominated by s.
double dominated_metric(const TrialArchive& arch);

// (prod v_i)^(1/k) over minimized metric values; any zero gives 0.
double g_mean(const std::vector<double>& values);

enum class RankSumVerdict { better, similar, worse };
const std::string& verdict_name(RankSumVerdict v);

// Two-sided Mann-Whitney U with tie correction and continuity correction;
// direction by median once significant at alpha_sig. larger_is_better says
// which direction counts as an improvement for sample a.
RankSumVerdict rank_sum_test(const std::vector<double>& a, const std::vector<double>& b,
                             double alpha_sig = 0.05, bool larger_is_better = true);

}  // namespace fairmoo
