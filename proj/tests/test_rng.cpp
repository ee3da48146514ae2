#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fairmoo/rng.hpp"

using namespace fairmoo;

TEST_CASE("identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("bounded uniform respects its interval") {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        double u = rng.uniform(-3.0, 2.0);
        CHECK(u >= -3.0);
        CHECK(u < 2.0);
    }
}

TEST_CASE("uniform_index covers every bucket") {
    Rng rng(11);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 10000; ++i) ++counts[rng.uniform_index(10)];
    for (int c : counts) CHECK(c > 800);
}

TEST_CASE("normal has roughly standard moments") {
    Rng rng(13);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("shuffle permutes without losing elements") {
    Rng rng(17);
    std::vector<int> v(100);
    std::iota(v.begin(), v.end(), 0);
    auto orig = v;
    rng.shuffle(v);
    CHECK(v != orig);  // 1/100! chance of a false alarm
    std::sort(v.begin(), v.end());
    CHECK(v == orig);
}

TEST_CASE("derived streams are stable and distinct") {
    Rng master(99);
    Rng a1 = master.derive(1), a2 = master.derive(1), b = master.derive(2);
    CHECK(a1.next_u64() == a2.next_u64());
    Rng a3 = master.derive(1);
    CHECK(a3.next_u64() != b.next_u64());
}

TEST_CASE("hash_combine separates nearby counters") {
    CHECK(hash_combine(42, 0) != hash_combine(42, 1));
    CHECK(hash_combine(42, 1) != hash_combine(43, 0));
    CHECK(hash_combine(42, 7) == hash_combine(42, 7));
}
