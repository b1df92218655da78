#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "cfsched/coeff_search.hpp"
#include "cfsched/rng.hpp"

using namespace cfsched;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("canonicalize flips to first-nonzero-positive") {
    CHECK(canonicalize(CoeffVector{0, -1, 2}) == CoeffVector{0, 1, -2});
    CHECK(canonicalize(CoeffVector{1, -1}) == CoeffVector{1, -1});
    CHECK(canonicalize(CoeffVector{0, 0}) == CoeffVector{0, 0});
}

TEST_CASE("enumerate_candidates hand examples") {
    const CandidateSet s1 = enumerate_candidates(ChannelVector{1.0, 0.0}, 3.0);
    CHECK(s1.vectors == std::vector<CoeffVector>{{0, 1}, {1, 0}, {2, 0}});

    const CandidateSet s2 = enumerate_candidates(ChannelVector{1.0, 1.0}, 0.1);
    CHECK(s2.vectors == std::vector<CoeffVector>{{0, 1}, {1, 0}});

    CHECK_THROWS_AS(enumerate_candidates(ChannelVector{0.0, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("candidate set invariants on random channels") {
    for (std::uint32_t i = 0; i < 300; ++i) {
        CounterRng rng(0x5EED, i, 0, 0);
        const std::size_t n = 2 + std::size_t(rng.uniform_below(5));
        const ChannelVector h = sample_channel(n, rng);
        const double power = std::exp(rng.uniform01() * std::log(100.0));
        const CandidateSet cs = enumerate_candidates(h, power);
        const double feas = 1.0 + power * detail::norm2(h);

        // candidate-set cardinality bound
        const double bound = 2.0 * double(n) * (std::ceil(std::sqrt(feas)) + 1.0);
        REQUIRE(double(cs.size()) <= bound);

        std::set<CoeffVector> seen;
        for (const CoeffVector& a : cs.vectors) {
            REQUIRE(detail::norm2_int(a) <= std::int64_t(feas));
            REQUIRE(a == canonicalize(a));
            REQUIRE(seen.insert(a).second);  // no duplicates
        }
        // every unit vector with h_i != 0 present
        for (std::size_t j = 0; j < n; ++j) {
            if (h[j] == 0.0) continue;
            CoeffVector e(n, 0);
            e[j] = 1;
            REQUIRE(seen.count(e) == 1);
        }
    }
}

TEST_CASE("best_coeff hand examples") {
    const SearchResult single = best_coeff(ChannelVector{0.0, 2.5, 0.0}, 7.0);
    CHECK(single.best == CoeffVector{0, 1, 0});
    CHECK(single.is_unit);

    const SearchResult near = best_coeff(ChannelVector{1.0, 1.02}, 100.0);
    CHECK(near.best == CoeffVector{1, 1});
    CHECK_FALSE(near.is_unit);

    const SearchResult diag = best_coeff(ChannelVector{1.0, 1.0}, 1000.0);
    CHECK(diag.best == CoeffVector{1, 1});
}

TEST_CASE("best_coeff result is self-consistent and feasible") {
    for (std::uint32_t i = 0; i < 400; ++i) {
        CounterRng rng(0xFACE, i, 0, 0);
        const std::size_t n = 2 + std::size_t(rng.uniform_below(7));
        const ChannelVector h = sample_channel(n, rng);
        const double power = std::exp(rng.uniform01() * std::log(1000.0));
        const SearchResult r = best_coeff(h, power);
        REQUIRE_THAT(r.f_value, WithinRel(quad_form(h, power, r.best), 1e-9));
        REQUIRE(r.rate == computation_rate(h, r.best, power));
        REQUIRE(double(detail::norm2_int(r.best)) <= 1.0 + power * detail::norm2(h));
        REQUIRE(r.is_unit == is_unit_vector(r.best));
    }
}

TEST_CASE("brute-force oracle agrees with breakpoint search") {
    std::uint32_t i = 0;
    for (std::size_t n : {2, 3, 4}) {
        for (double power : {1.0, 10.0, 100.0}) {
            for (int rep = 0; rep < 20; ++rep, ++i) {
                CounterRng rng(0x0AC1E, i, 0, 0);
                const ChannelVector h = sample_channel(n, rng);
                const int box = int(std::ceil(std::sqrt(1.0 + power * detail::norm2(h))));
                const SearchResult fast = best_coeff(h, power);
                const SearchResult slow = best_coeff_bruteforce(h, power, box);
                REQUIRE_THAT(fast.f_value, WithinRel(slow.f_value, 1e-9));
            }
        }
    }
    // exact agreement incl. tie-breaking on the worked example
    const SearchResult a = best_coeff(ChannelVector{1.0, 0.5}, 10.0);
    const SearchResult b = best_coeff_bruteforce(ChannelVector{1.0, 0.5}, 10.0, 4);
    CHECK(a.best == b.best);
    CHECK(a.f_value == b.f_value);
}

TEST_CASE("brute force 1-D and guards") {
    const SearchResult r = best_coeff_bruteforce(ChannelVector{1.4}, 5.0, 4);
    const SearchResult f = best_coeff(ChannelVector{1.4}, 5.0);
    CHECK(r.best == f.best);
    CHECK_THROWS_AS(best_coeff_bruteforce(ChannelVector(12, 1.0), 1.0, 10), std::runtime_error);
}

TEST_CASE("best_unit selection and tie rule") {
    const SearchResult r = best_unit(ChannelVector{0.1, -2.0, 0.5}, 2.0);
    CHECK(r.best == CoeffVector{0, 1, 0});
    const double nh2 = 0.01 + 4.0 + 0.25;
    CHECK_THAT(r.f_value, WithinRel(1.0 + 2.0 * (nh2 - 4.0), 1e-12));

    const SearchResult tie = best_unit(ChannelVector{1.0, 1.0}, 1.0);
    CHECK(tie.best == CoeffVector{1, 0});
}

TEST_CASE("best_unit index is scale covariant") {
    for (std::uint32_t i = 0; i < 200; ++i) {
        CounterRng rng(0x5CA1E, i, 0, 0);
        const std::size_t n = 2 + std::size_t(rng.uniform_below(8));
        const ChannelVector h = sample_channel(n, rng);
        const SearchResult base = best_unit(h, 3.0);
        for (double c : {0.01, 0.5, 7.0, 500.0}) {
            ChannelVector hc(n);
            for (std::size_t j = 0; j < n; ++j) hc[j] = c * h[j];
            REQUIRE(best_unit(hc, 3.0).best == base.best);
        }
    }
}

TEST_CASE("sign_match examples and optimality over all sign patterns") {
    CHECK(sign_match(CoeffVector{1, 1}, ChannelVector{-0.9, 1.1}) == CoeffVector{-1, 1});
    CHECK(sign_match(CoeffVector{1, 1, 1}, ChannelVector{1, 1, 1}) == CoeffVector{1, 1, 1});
    CHECK_THROWS_AS(sign_match(CoeffVector{-1}, ChannelVector{1.0}), std::invalid_argument);

    for (std::uint32_t i = 0; i < 60; ++i) {
        CounterRng rng(0x51C9, i, 0, 0);
        const std::size_t k = 2 + std::size_t(rng.uniform_below(5));
        const ChannelVector h = sample_channel(k, rng);
        CoeffVector mag(k);
        for (int& x : mag) x = 1 + int(rng.uniform_below(3));
        const double power = 1.0 + rng.uniform01() * 50.0;
        const double best = computation_rate(h, sign_match(mag, h), power);
        for (std::uint32_t s = 0; s < (1u << k); ++s) {
            CoeffVector a(k);
            for (std::size_t j = 0; j < k; ++j) a[j] = (s >> j) & 1 ? -mag[j] : mag[j];
            REQUIRE(computation_rate(h, a, power) <= best + 1e-12);
        }
    }
}

TEST_CASE("cos2_angle basics") {
    CHECK_THAT(cos2_angle(CoeffVector{1, 0}, ChannelVector{3.7, 0}), WithinAbs(1.0, 1e-12));
    CHECK_THAT(cos2_angle(CoeffVector{1, -1}, ChannelVector{1, 1}), WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(cos2_angle(CoeffVector{0, 0}, ChannelVector{1, 1}), std::invalid_argument);
    for (std::uint32_t i = 0; i < 200; ++i) {
        CounterRng rng(0xC052, i, 0, 0);
        const ChannelVector h = sample_channel(6, rng);
        const double v = cos2_angle(CoeffVector{1, -2, 0, 3, 1, 1}, h);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("unit optimum dominates at moderate L") {
    // Fig. 2 regime: by L = 30 the optimum is a unit vector in almost all draws.
    std::size_t units = 0;
    const std::size_t trials = 200;
    for (std::uint32_t i = 0; i < trials; ++i) {
        CounterRng rng(0x0F19, i, 0, 0);
        const ChannelVector h = sample_channel(30, rng);
        if (best_coeff(h, 10.0).is_unit) ++units;
    }
    CHECK(units >= trials * 8 / 10);
}
