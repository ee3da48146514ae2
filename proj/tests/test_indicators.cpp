#include "fairmoo/indicators.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "fairmoo/errors.hpp"
#include "fairmoo/moea.hpp"
#include "fairmoo/rng.hpp"
#include "support.hpp"

using namespace fairmoo;

namespace {

using Rows = std::vector<std::vector<double>>;

// Inclusion-exclusion over all nonempty subsets; intersection of dominated
// boxes starts at the componentwise max. Exponential, so oracle-only.
double incl_excl_hv(const Rows& ps) {
    const std::size_t n = ps.size();
    const std::size_t m = ps.front().size();
    double total = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> corner(m, 0.0);
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1)) continue;
            ++bits;
            for (std::size_t k = 0; k < m; ++k) corner[k] = std::max(corner[k], ps[i][k]);
        }
        double vol = 1.0;
        for (double c : corner) vol *= kHvReference - c;
        total += (bits % 2 ? 1.0 : -1.0) * vol;
    }
    return total;
}

Rows random_points(Rng& rng, std::size_t n, std::size_t m, double hi) {
    Rows out(n, std::vector<double>(m));
    for (auto& row : out) {
        for (double& v : row) v = rng.uniform(0.0, hi);
    }
    return out;
}

// 51 evenly spaced points on the anti-diagonal from (0,1) to (1,0).
Rows diagonal_front_points() {
    Rows pts;
    for (int i = 0; i <= 50; ++i) {
        const double t = static_cast<double>(i) / 50.0;
        pts.push_back({t, 1.0 - t});
    }
    return pts;
}

}  // namespace

TEST_CASE("build_pseudo_front pools runs and filters to the nondominated set") {
    const Rows run1 = {{0.0, 2.0}, {2.0, 2.0}};
    const Rows run2 = {{1.0, 1.0}, {3.0, 0.0}};
    const PseudoFront front = build_pseudo_front({run1, run2});
    CHECK(front.points == Rows{{0.0, 2.0}, {1.0, 1.0}, {3.0, 0.0}});
    CHECK(front.ideal == std::vector<double>{0.0, 0.0});
    CHECK(front.nadir == std::vector<double>{3.0, 2.0});
    CHECK(front.degenerate == std::vector<char>{0, 0});
    CHECK(front.dims() == 2);

    CHECK_THROWS_AS(build_pseudo_front({}), DataError);
    CHECK_THROWS_AS(build_pseudo_front({{{1.0, 2.0}, {1.0}}}), DataError);
}

TEST_CASE("a zero-spread objective is flagged and given unit width") {
    fairmoo::test::WarnCapture warns;
    const PseudoFront front = build_pseudo_front({{{0.0, 1.0}, {0.0, 2.0}}});
    REQUIRE(front.points.size() == 1);  // (0,1) dominates (0,2)
    CHECK(front.degenerate == std::vector<char>{1, 1});
    CHECK(warns.contains("zero spread"));
    const auto norm = normalize({{0.5, 1.5}}, front);
    CHECK(norm[0][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm[0][1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normalize maps bounds to the unit box and clips the rest") {
    const PseudoFront front = build_pseudo_front({{{0.0, 10.0}, {4.0, 2.0}}});
    const auto norm = normalize({{0.0, 2.0}, {4.0, 10.0}, {2.0, 6.0}, {-8.0, 26.0}}, front);
    CHECK(norm[0] == std::vector<double>{0.0, 0.0});  // ideal
    CHECK(norm[1] == std::vector<double>{1.0, 1.0});  // nadir
    CHECK(norm[2] == std::vector<double>{0.5, 0.5});  // midpoint
    CHECK(norm[3] == std::vector<double>{0.0, kHvReference});
    CHECK_THROWS_AS(normalize({{1.0}}, front), DataError);
}

TEST_CASE("exact hypervolume matches hand inclusion-exclusion cases") {
    CHECK(hypervolume_exact({{0.0, 0.0}}) == doctest::Approx(1.21).epsilon(1e-13));
    CHECK(hypervolume_exact({{0.0, 0.5}, {0.5, 0.0}}) == doctest::Approx(0.96).epsilon(1e-13));
    CHECK(hypervolume_exact({{1.1, 1.1}}) == 0.0);
    CHECK(hypervolume_exact({{0.5, 0.5}, {0.5, 0.5}}) == doctest::Approx(0.36).epsilon(1e-13));
    CHECK(hypervolume_exact({{0.0, 0.0, 0.5}, {0.5, 0.0, 0.0}}) ==
          doctest::Approx(1.056).epsilon(1e-13));
    CHECK_THROWS_AS(hypervolume_exact({{0.5}}), ConfigError);
    CHECK_THROWS_AS(hypervolume_exact({{-0.1, 0.5}}), DataError);
}

TEST_CASE("points beyond the reference contribute zero, with a warning") {
    fairmoo::test::WarnCapture warns;
    const double hv = hypervolume_exact({{0.5, 0.5}, {1.2, 0.0}});
    CHECK(hv == doctest::Approx(0.36).epsilon(1e-13));
    CHECK(warns.contains("beyond reference"));
}

TEST_CASE("exact hypervolume agrees with the subset oracle on random sets") {
    Rng rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(9);
        const std::size_t m = 2 + rng.uniform_index(3);  // 2..4
        const Rows pts = random_points(rng, n, m, 1.1);
        CHECK(hypervolume_exact(pts) == doctest::Approx(incl_excl_hv(pts)).epsilon(1e-10));
    }
}

TEST_CASE("hypervolume is monotone under added points") {
    Rng rng(707);
    for (int trial = 0; trial < 30; ++trial) {
        Rows pts = random_points(rng, 1 + rng.uniform_index(10), 3, 1.1);
        const double before = hypervolume_exact(pts);
        pts.push_back(random_points(rng, 1, 3, 1.1).front());
        CHECK(hypervolume_exact(pts) >= before - 1e-12);
    }
}

TEST_CASE("Monte-Carlo hypervolume brackets the exact value") {
    Rng rng(909);
    for (int trial = 0; trial < 5; ++trial) {
        const Rows pts = random_points(rng, 6, 3, 1.0);
        const double exact = hypervolume_exact(pts);
        const HvEstimate mc = hypervolume_mc(pts, 200000, 1000 + trial);
        CHECK_FALSE(mc.exact);
        CHECK(mc.se > 0.0);
        CHECK(std::abs(mc.value - exact) <= 3.0 * mc.se);
    }
    CHECK_THROWS_AS(hypervolume_mc({{0.5, 0.5}}, 0, 1), ConfigError);
}

TEST_CASE("hypervolume switches to sampling beyond four objectives") {
    const HvEstimate low = hypervolume({{0.0, 0.5}, {0.5, 0.0}});
    CHECK(low.exact);
    CHECK(low.se == 0.0);
    CHECK(low.value == doctest::Approx(0.96).epsilon(1e-13));

    // Single 5-D point: the box volume is known in closed form.
    const HvEstimate high = hypervolume({{0.5, 0.5, 0.5, 0.5, 0.5}});
    CHECK_FALSE(high.exact);
    CHECK(high.se > 0.0);
    CHECK(std::abs(high.value - std::pow(0.6, 5)) <= 3.0 * high.se);
}

TEST_CASE("normalized hypervolume is invariant to positive affine rescaling") {
    Rng rng(111);
    const Rows raw = random_points(rng, 12, 3, 5.0);
    Rows scaled = raw;
    const double mul[3] = {7.0, 0.25, 130.0};
    const double add[3] = {-2.0, 11.0, 0.5};
    for (auto& row : scaled) {
        for (std::size_t k = 0; k < 3; ++k) row[k] = mul[k] * row[k] + add[k];
    }
    const PseudoFront f1 = build_pseudo_front({raw});
    const PseudoFront f2 = build_pseudo_front({scaled});
    const double h1 = hypervolume_exact(normalize(raw, f1));
    const double h2 = hypervolume_exact(normalize(scaled, f2));
    CHECK(h1 == doctest::Approx(h2).epsilon(1e-12));
}

TEST_CASE("cpf is 1 on the front itself and 0 far behind it") {
    const Rows pts = diagonal_front_points();
    const PseudoFront front = build_pseudo_front({pts});
    CHECK(cpf(pts, front) == 1.0);
    CHECK(cpf({{10.0, 10.0}}, front) == 0.0);
}

TEST_CASE("cpf grows with nested subsets of the front") {
    const Rows pts = diagonal_front_points();
    const PseudoFront front = build_pseudo_front({pts});
    double prev = 0.0;
    for (std::size_t keep : {5, 15, 30, 51}) {
        const Rows prefix(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(keep));
        const double value = cpf(prefix, front);
        CHECK(value >= prev);
        prev = value;
    }
    CHECK(prev == 1.0);
    const double half = cpf(Rows(pts.begin(), pts.begin() + 10), front);
    CHECK(half > 0.0);
    CHECK(half < 1.0);
}

TEST_CASE("cpf handles degenerate fronts and bad inputs") {
    PseudoFront front;
    front.points = {{1.0, 1.0}, {1.0, 1.0}};
    front.ideal = {1.0, 1.0};
    front.nadir = {1.0, 1.0};
    front.degenerate = {1, 1};
    fairmoo::test::WarnCapture warns;
    CHECK(cpf({{1.0, 1.0}}, front) == 0.0);
    CHECK(warns.contains("no two distinct points"));

    const PseudoFront ok = build_pseudo_front({diagonal_front_points()});
    CHECK_THROWS_AS(cpf({}, ok), DataError);
    CHECK_THROWS_AS(cpf({{0.0, 1.0}}, ok, 0), ConfigError);
}

TEST_CASE("cpf subsampling is deterministic for a fixed seed") {
    const Rows pts = diagonal_front_points();
    const PseudoFront front = build_pseudo_front({pts});
    const Rows some(pts.begin(), pts.begin() + 20);
    const double a = cpf(some, front, 17, 42);
    const double b = cpf(some, front, 17, 42);
    CHECK(a == b);
}

TEST_CASE("dominance metrics match a hand-enumerated archive") {
    TrialArchive arch;
    arch.s = {1.0, 1.0};
    arch.trials = {
        {{0.0, 0.0}},               // dominates s
        {{2.0, 2.0}},               // dominated by s
        {{0.0, 2.0}, {1.0, 1.0}},   // incomparable and equal-to-s
    };
    CHECK(dominate_metric(arch) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(incomparable_metric(arch) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(dominated_metric(arch) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("dominance metrics cover the trivial extremes") {
    TrialArchive equal;
    equal.s = {1.0, 1.0};
    equal.trials = {{{1.0, 1.0}}, {{1.0, 1.0}}};
    CHECK(dominate_metric(equal) == 0.0);
    CHECK(incomparable_metric(equal) == 1.0);
    CHECK(dominated_metric(equal) == 0.0);

    TrialArchive beaten;
    beaten.s = {0.0, 0.0};
    beaten.trials = {{{1.0, 1.0}, {2.0, 3.0}}, {{0.5, 0.5}}};
    CHECK(dominate_metric(beaten) == 0.0);
    CHECK(incomparable_metric(beaten) == 0.0);
    CHECK(dominated_metric(beaten) == 1.0);
}

TEST_CASE("within-trial proportions always sum to one") {
    Rng rng(313);
    for (int round = 0; round < 100; ++round) {
        TrialArchive arch;
        arch.s = {2.0, 2.0};
        const std::size_t trials = 3 + rng.uniform_index(6);
        double dominating = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const std::size_t n = 1 + rng.uniform_index(20);
            Rows rows(n, std::vector<double>(2));
            std::size_t dom = 0;
            for (auto& row : rows) {
                for (double& v : row) v = static_cast<double>(rng.uniform_index(5));
                if (dominates(row, arch.s)) ++dom;
            }
            dominating += static_cast<double>(dom) / static_cast<double>(n);
            arch.trials.push_back(std::move(rows));
        }
        dominating /= static_cast<double>(trials);
        const double total = dominating + incomparable_metric(arch) + dominated_metric(arch);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("empty trials are skipped with a warning, never counted") {
    TrialArchive arch;
    arch.s = {1.0, 1.0};
    arch.trials = {{}, {{0.0, 0.0}}};
    fairmoo::test::WarnCapture warns;
    CHECK(dominate_metric(arch) == 1.0);
    CHECK(warns.contains("empty"));

    TrialArchive hollow;
    hollow.s = {1.0, 1.0};
    hollow.trials = {{}, {}};
    CHECK_THROWS_AS(dominate_metric(hollow), DataError);
    CHECK_THROWS_AS(dominated_metric(TrialArchive{}), DataError);
}

TEST_CASE("g_mean multiplies and roots, with zero and sign handling") {
    CHECK(g_mean({0.3, 0.3, 0.3}) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(g_mean({0.04, 0.01}) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(g_mean({0.5, 0.0, 0.9}) == 0.0);
    CHECK_THROWS_AS(g_mean({0.5, -0.1}), DomainError);
    CHECK_THROWS_AS(g_mean({}), DataError);
}

TEST_CASE("rank_sum_test separates shifted samples and respects orientation") {
    std::vector<double> b;
    for (int i = 0; i < 30; ++i) b.push_back(static_cast<double>(i));
    std::vector<double> a = b;
    for (double& v : a) v += 100.0;
    CHECK(rank_sum_test(a, b, 0.05, true) == RankSumVerdict::better);
    CHECK(rank_sum_test(a, b, 0.05, false) == RankSumVerdict::worse);
    CHECK(rank_sum_test(b, a, 0.05, true) == RankSumVerdict::worse);
    CHECK(verdict_name(RankSumVerdict::similar) == "similar");
}

TEST_CASE("rank_sum_test reports fully tied samples as similar") {
    fairmoo::test::WarnCapture warns;
    const std::vector<double> same = {1.0, 1.0, 1.0, 1.0};
    CHECK(rank_sum_test(same, same) == RankSumVerdict::similar);
    CHECK(warns.contains("tied"));
}

TEST_CASE("rank_sum_test verdicts sit on the tabulated five-by-five boundary") {
    // U = 2: exact two-sided p ~ 0.032, inside 0.05.
    const std::vector<double> a2 = {10.0, 20.0, 30.0, 40.0, 70.0};
    const std::vector<double> b2 = {50.0, 60.0, 80.0, 90.0, 100.0};
    CHECK(rank_sum_test(a2, b2, 0.05, false) == RankSumVerdict::better);
    CHECK(rank_sum_test(a2, b2, 0.05, true) == RankSumVerdict::worse);
    // U = 3: exact two-sided p ~ 0.056, just outside 0.05.
    const std::vector<double> a3 = {10.0, 20.0, 30.0, 40.0, 80.0};
    const std::vector<double> b3 = {50.0, 60.0, 70.0, 90.0, 100.0};
    CHECK(rank_sum_test(a3, b3, 0.05, false) == RankSumVerdict::similar);
}

TEST_CASE("rank_sum_test validates its inputs") {
    const std::vector<double> ok = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(rank_sum_test({1.0, 2.0}, ok), DataError);
    CHECK_THROWS_AS(rank_sum_test(ok, {1.0}), DataError);
    CHECK_THROWS_AS(rank_sum_test(ok, ok, 0.0), ConfigError);
    CHECK_THROWS_AS(rank_sum_test(ok, ok, 1.0), ConfigError);
}
