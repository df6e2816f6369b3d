#include "doctest.h"

#include <set>
#include <stdexcept>

#include "tietime/process.hpp"

using namespace tietime;

TEST_CASE("step distribution matches the winner moves") {
    SUBCASE("three teams") {
        const auto v = step_distribution(3);
        REQUIRE(v.size() == 3);
        CHECK(v[0].delta == std::vector<int>{-1, 0});
        CHECK(v[1].delta == std::vector<int>{1, -1});
        CHECK(v[2].delta == std::vector<int>{0, 1});
    }
    SUBCASE("two teams is a simple random walk") {
        const auto v = step_distribution(2);
        REQUIRE(v.size() == 2);
        CHECK(v[0].delta == std::vector<int>{-1});
        CHECK(v[1].delta == std::vector<int>{1});
    }
    SUBCASE("four teams") {
        const auto v = step_distribution(4);
        REQUIRE(v.size() == 4);
        CHECK(v[0].delta == std::vector<int>{-1, 0, 0});
        CHECK(v[1].delta == std::vector<int>{1, -1, 0});
        CHECK(v[2].delta == std::vector<int>{0, 1, -1});
        CHECK(v[3].delta == std::vector<int>{0, 0, 1});
    }
    SUBCASE("invalid team count") {
        CHECK_THROWS_AS(step_distribution(1), std::invalid_argument);
    }
}

TEST_CASE("deltas cancel coordinate-wise, so each gap is drift-free") {
    for (int m = 2; m <= 8; ++m) {
        const auto v = step_distribution(m);
        std::vector<int> sum(m - 1, 0);
        for (const auto& d : v) {
            int nonzero = 0;
            for (int i = 0; i < m - 1; ++i) {
                sum[i] += d.delta[i];
                nonzero += d.delta[i] != 0;
                CHECK(std::abs(d.delta[i]) <= 1);
            }
            CHECK(nonzero <= 2);
        }
        CHECK(sum == std::vector<int>(m - 1, 0));
    }
}

TEST_CASE("gaps from scores") {
    const auto s = gaps_from_scores({5, 2, 9});
    CHECK(s.m == 3);
    CHECK(s.gaps == std::vector<std::int64_t>{3, 4});

    const auto s2 = gaps_from_scores({0, 1});
    CHECK(s2.m == 2);
    CHECK(s2.gaps == std::vector<std::int64_t>{1});

    CHECK_THROWS_AS(gaps_from_scores({10, 7, 7, 1}), std::invalid_argument);
}

TEST_CASE("apply step and tie detection") {
    CHECK(apply_step(GapState{3, {2, 3}}, 2).gaps == std::vector<std::int64_t>{3, 2});
    CHECK(apply_step(GapState{4, {1, 1, 1}}, 4).gaps == std::vector<std::int64_t>{1, 1, 2});
    const auto tied = apply_step(GapState{3, {1, 1}}, 1);
    CHECK(tied.gaps == std::vector<std::int64_t>{0, 1});
    CHECK(is_tied(tied));
    CHECK_THROWS_AS(apply_step(GapState{3, {1, 1}}, 4), std::invalid_argument);

    CHECK(is_tied(GapState{3, {0, 5}}));
    CHECK_FALSE(is_tied(GapState{3, {2, 3}}));
    CHECK(is_tied(GapState{4, {1, 0, 4}}));
}

TEST_CASE("forced winner sequence stops immediately") {
    const GapState start{3, {1, 1}};
    const auto sample = run_chain(start, 0, 1, 100, [](std::uint64_t) { return 1; });
    CHECK(sample.steps == 1);
    CHECK(sample.absorbed);
    CHECK(sample.hit_index == 1);
}

TEST_CASE("one-step tie probabilities by exhaustive enumeration") {
    // every length-1 winner sequence, equally likely
    SUBCASE("three teams from (1,1): 2 of 3 moves tie") {
        int ties = 0;
        for (int w = 1; w <= 3; ++w) {
            const auto next = apply_step(GapState{3, {1, 1}}, w);
            ties += is_tied(next);
        }
        CHECK(ties == 2);
    }
    SUBCASE("four teams from (1,1,1): 3 of 4 moves tie") {
        int ties = 0;
        for (int w = 1; w <= 4; ++w) {
            ties += is_tied(apply_step(GapState{4, {1, 1, 1}}, w));
        }
        CHECK(ties == 3);
    }
    SUBCASE("pair watch for m=4 from (1,1,x): 2 of 4 moves stop the pair") {
        // winner 1 zeroes gap 1, winner 2 zeroes gap 2; winner 3 raises
        // gap 2 and winner 4 does not touch the pair
        const GapState start{4, {1, 1, 5}};
        int stops = 0;
        for (int w = 1; w <= 4; ++w) {
            const auto next = apply_step(start, w);
            stops += (next.gaps[0] == 0 || next.gaps[1] == 0);
        }
        CHECK(stops == 2);
    }
}

TEST_CASE("sampling estimates match the enumerated one-step law") {
    const std::uint64_t trials = 40000;
    int hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto s = sample_tie_time(GapState{3, {1, 1}}, 99, t, 1000000);
        hits += s.absorbed && s.steps == 1;
    }
    const double p = static_cast<double>(hits) / trials;
    CHECK(p == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("sampling is a pure function of seed, trial and horizon") {
    const GapState start{4, {2, 3, 1}};
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto a = sample_tie_time(start, 7, t, 100000);
        const auto b = sample_tie_time(start, 7, t, 100000);
        CHECK(a.steps == b.steps);
        CHECK(a.absorbed == b.absorbed);
        CHECK(a.hit_index == b.hit_index);
    }
}

TEST_CASE("absorbed samples end with exactly one zero gap") {
    for (std::uint64_t t = 0; t < 200; ++t) {
        const GapState start{4, {2, 1, 3}};
        const auto s = sample_tie_time(start, 11, t, 100000);
        REQUIRE(s.absorbed);
        REQUIRE(s.hit_index.has_value());
        // replay the trajectory and inspect the final state
        GapState cur = start;
        WinnerStream ws(11, t);
        for (std::uint64_t n = 1; n <= s.steps; ++n) cur = apply_step(cur, ws.winner(n, 4));
        int zeros = 0;
        for (const auto g : cur.gaps) zeros += g == 0;
        CHECK(zeros == 1);
        CHECK(cur.gaps[*s.hit_index - 1] == 0);
    }
}

TEST_CASE("pair sampling ignores the other gaps entirely") {
    // identical winner streams => identical pair outcomes, whatever a_1 is
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto a = sample_pair_tie_time(GapState{5, {1, 4, 2, 3}}, 2, 5, t, 100000);
        const auto b = sample_pair_tie_time(GapState{5, {9, 4, 2, 3}}, 2, 5, t, 100000);
        CHECK(a.steps == b.steps);
        CHECK(a.hit_index == b.hit_index);
    }
}

TEST_CASE("pair sampling equals full sampling when only one pair exists") {
    for (std::uint64_t t = 0; t < 100; ++t) {
        const GapState start{3, {2, 3}};
        const auto full = sample_tie_time(start, 3, t, 100000);
        const auto only_pair = sample_pair_tie_time(start, 1, 3, t, 100000);
        CHECK(full.steps == only_pair.steps);
    }
}

TEST_CASE("horizon truncation is reported, not dropped") {
    const auto s = sample_tie_time(GapState{3, {5, 5}}, 1, 0, 3);
    if (!s.absorbed) {
        CHECK(s.steps == 3);
        CHECK_FALSE(s.hit_index.has_value());
    }
    CHECK_THROWS_AS(sample_tie_time(GapState{3, {0, 1}}, 1, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(sample_pair_tie_time(GapState{4, {1, 1, 1}}, 3, 1, 0, 10),
                    std::invalid_argument);
}
