#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cfsched/rng.hpp"

using namespace cfsched;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 test suite.
    auto out = detail::philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(out == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    out = detail::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu});
    CHECK(out == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    out = detail::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
    CHECK(out == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
    CounterRng a(42, 7, 3, 1), b(42, 7, 3, 1);
    const auto va = sample_channel(16, a);
    const auto vb = sample_channel(16, b);
    CHECK(va == vb);

    CounterRng c(42, 7, 3, 2);  // different relay
    CHECK(sample_channel(16, c) != va);
    CounterRng d(43, 7, 3, 1);  // different seed
    CHECK(sample_channel(16, d) != va);
}

TEST_CASE("normal draws match N(0,1) moments") {
    CounterRng rng(2024, 0, 0, 0);
    const std::size_t n = 1'000'000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / double(n);
    const double var = sumsq / double(n) - mean * mean;
    CHECK(std::abs(mean) < 3e-3);
    CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("uniform01 stays in (0,1]") {
    CounterRng rng(7, 0, 0, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
    }
}

TEST_CASE("uniform_below is bounded and rejects n=0") {
    CounterRng rng(7, 1, 0, 0);
    for (int i = 0; i < 10000; ++i) CHECK(rng.uniform_below(13) < 13);
    CHECK_THROWS_AS(rng.uniform_below(0), std::invalid_argument);
}
