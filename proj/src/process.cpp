#include "tietime/process.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tietime {

std::vector<StepDelta> step_distribution(int m) {
    if (m < 2) throw std::invalid_argument("team count must be at least 2");
    std::vector<StepDelta> out;
    out.reserve(m);
    for (int w = 1; w <= m; ++w) {
        StepDelta d;
        d.winner = w;
        d.delta.assign(m - 1, 0);
        if (w == 1) {
            d.delta[0] = -1;
        } else if (w == m) {
            d.delta[m - 2] = +1;
        } else {
            d.delta[w - 2] = +1;
            d.delta[w - 1] = -1;
        }
        out.push_back(std::move(d));
    }
    return out;
}

GapState gaps_from_scores(const std::vector<std::int64_t>& scores) {
    if (scores.size() < 2) throw std::invalid_argument("need at least two scores");
    std::vector<std::int64_t> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    GapState s;
    s.m = static_cast<int>(scores.size());
    s.gaps.reserve(scores.size() - 1);
    for (size_t i = 1; i < sorted.size(); ++i) {
        const std::int64_t gap = sorted[i] - sorted[i - 1];
        if (gap == 0) throw std::invalid_argument("duplicate scores: already tied");
        s.gaps.push_back(gap);
    }
    return s;
}

GapState apply_step(const GapState& state, int winner) {
    if (winner < 1 || winner > state.m) {
        throw std::invalid_argument("winner out of range: " + std::to_string(winner));
    }
    GapState next = state;
    const int m = state.m;
    if (winner == 1) {
        --next.gaps[0];
    } else if (winner == m) {
        ++next.gaps[m - 2];
    } else {
        ++next.gaps[winner - 2];
        --next.gaps[winner - 1];
    }
    return next;
}

bool is_tied(const GapState& state) {
    return std::any_of(state.gaps.begin(), state.gaps.end(),
                       [](std::int64_t g) { return g == 0; });
}

namespace {

void check_start(const GapState& start, std::uint64_t horizon) {
    if (start.m < 2 || start.gaps.size() != static_cast<size_t>(start.m - 1)) {
        throw std::invalid_argument("gap vector length must be m-1");
    }
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
}

}  // namespace

StoppingSample sample_tie_time(const GapState& start, std::uint64_t seed,
                               std::uint64_t trial, std::uint64_t horizon) {
    check_start(start, horizon);
    if (is_tied(start)) throw std::invalid_argument("start state is already tied");
    WinnerStream ws(seed, trial);
    const int m = start.m;
    return run_chain(
        start, 0, start.m - 2, horizon,
        [&](std::uint64_t n) { return ws.winner(n, m); }, SeedRecord{seed, trial});
}

StoppingSample sample_pair_tie_time(const GapState& start, int pair_index,
                                    std::uint64_t seed, std::uint64_t trial,
                                    std::uint64_t horizon) {
    check_start(start, horizon);
    if (pair_index < 1 || pair_index > start.m - 2) {
        throw std::invalid_argument("pair index must be in 1..m-2");
    }
    if (start.gaps[pair_index - 1] <= 0 || start.gaps[pair_index] <= 0) {
        throw std::invalid_argument("watched pair must start positive");
    }
    WinnerStream ws(seed, trial);
    const int m = start.m;
    return run_chain(
        start, pair_index - 1, pair_index, horizon,
        [&](std::uint64_t n) { return ws.winner(n, m); }, SeedRecord{seed, trial});
}

}  // namespace tietime
