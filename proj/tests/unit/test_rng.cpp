#include <doctest.h>

#include <cmath>
#include <set>

#include "ipp/rng.hpp"

using ipp::Philox4x32;
using ipp::Rng;

TEST_CASE("philox known-answer vectors") {
    // Random123 kat_vectors, philox4x32 with 10 rounds
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) ==
          Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                               {0xffffffff, 0xffffffff}) ==
          Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                               {0xa4093822, 0x299f31d0}) ==
          Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
    }
    Rng parent(7);
    const Rng child1 = parent.substream(1);
    const Rng child2 = parent.substream(2);
    CHECK(child1.stream() != child2.stream());
    CHECK(child1.stream() != parent.stream());
    // drawing from a child does not advance the parent
    Rng p1(7), p2(7);
    Rng ch = p1.substream(3);
    for (int i = 0; i < 10; ++i) ch.next_u64();
    CHECK(p1.next_u64() == p2.next_u64());
}

TEST_CASE("uniform draws lie strictly inside (0, 1) and have the right moments") {
    Rng rng(1);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    CHECK(std::fabs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::fabs(sum2 / n - mean * mean - 1.0 / 12.0) < 2e-3);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-2.0, 3.0);
        CHECK(v > -2.0);
        CHECK(v < 3.0);
    }
}

TEST_CASE("normal draws have standard moments") {
    Rng rng(2);
    const int n = 400000;
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        m1 += z;
        m2 += z * z;
        m3 += z * z * z;
        m4 += z * z * z * z;
    }
    m1 /= n;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    CHECK(std::fabs(m1) < 4.0 / std::sqrt(n));
    CHECK(std::fabs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::fabs(m3) < 4.0 * std::sqrt(15.0 / n));
    CHECK(std::fabs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("mix64 is injective on a sample") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(ipp::mix64(i));
    CHECK(seen.size() == 10000);
}
