#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tietime/rng.hpp"

namespace tietime {

// Vector of adjacent score gaps for an m-team competition. Gap i (1-based)
// is the difference between the (i+1)-th and i-th smallest scores.
struct GapState {
    int m = 0;
    std::vector<std::int64_t> gaps;  // length m-1

    bool operator==(const GapState&) const = default;
};

// One of the m possible one-round gap updates: winner k shifts the gap
// vector by a fixed delta with entries in {-1,0,+1}.
struct StepDelta {
    int winner = 0;
    std::vector<int> delta;  // length m-1
};

struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
};

// Outcome of one simulated trajectory: either absorbed (some gap hit zero
// at step `steps`, recorded in hit_index) or truncated at the horizon.
struct StoppingSample {
    std::uint64_t steps = 0;
    bool absorbed = false;
    std::optional<int> hit_index;  // 1-based gap index that reached 0
    SeedRecord seed_record;
};

// The m one-round deltas, each with probability 1/m.
std::vector<StepDelta> step_distribution(int m);

// Sorted consecutive differences of the scores. Throws if scores collide
// (the competition would already be tied).
GapState gaps_from_scores(const std::vector<std::int64_t>& scores);

GapState apply_step(const GapState& state, int winner);

bool is_tied(const GapState& state);

// First time some gap reaches zero, following i.i.d. uniform winners.
StoppingSample sample_tie_time(const GapState& start, std::uint64_t seed,
                               std::uint64_t trial, std::uint64_t horizon);

// First time gap i or gap i+1 reaches zero (1 <= i <= m-2). Other gaps are
// ignored entirely and may go negative; each gap's update depends only on
// the winner index, so the pair dynamics are unaffected.
StoppingSample sample_pair_tie_time(const GapState& start, int pair_index,
                                    std::uint64_t seed, std::uint64_t trial,
                                    std::uint64_t horizon);

// Trajectory driver over an explicit winner source; WinnerFn(step) -> 1..m.
// `watch_lo`/`watch_hi` delimit the (0-based, inclusive) slots whose zeros
// absorb. Shared by both samplers and by tests that force winner sequences.
template <class WinnerFn>
StoppingSample run_chain(const GapState& start, int watch_lo, int watch_hi,
                         std::uint64_t horizon, WinnerFn&& next_winner,
                         SeedRecord rec = {}) {
    const int m = start.m;
    std::vector<std::int64_t> g = start.gaps;
    StoppingSample out;
    out.seed_record = rec;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        const int w = next_winner(n);
        // winner 1: gap 1 shrinks; winner m: gap m-1 grows;
        // winner k in between: gap k-1 grows, gap k shrinks.
        int hit = -1;
        if (w == 1) {
            if (--g[0] == 0 && 0 >= watch_lo && 0 <= watch_hi) hit = 0;
        } else if (w == m) {
            ++g[m - 2];
        } else {
            ++g[w - 2];
            if (--g[w - 1] == 0 && w - 1 >= watch_lo && w - 1 <= watch_hi) hit = w - 1;
        }
        if (hit >= 0) {
            out.steps = n;
            out.absorbed = true;
            out.hit_index = hit + 1;
            return out;
        }
    }
    out.steps = horizon;
    out.absorbed = false;
    return out;
}

}  // namespace tietime
