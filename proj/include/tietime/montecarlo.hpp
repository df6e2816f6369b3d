#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tietime/process.hpp"

namespace tietime {

struct McOptions {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::uint64_t horizon = 100000000;  // truncation is reported, never silent
    int blocks = 24;
    int workers = 1;
};

// Mean estimate with a median-of-means 95% interval built from the order
// statistics of the block means (robust under infinite variance). The
// interval is widened to the sample mean if a heavy-tailed block pushes the
// mean outside it, so mom_ci_low <= mean <= mom_ci_high always holds.
struct EstimateSummary {
    std::uint64_t trials = 0;
    std::uint64_t truncated = 0;
    double mean = 0;
    double mom_ci_low = 0;
    double mom_ci_high = 0;
    int block_count = 0;
    std::uint64_t horizon = 0;
    bool biased_low = false;  // some trials hit the horizon
    std::string warning;

    double half_width() const { return 0.5 * (mom_ci_high - mom_ci_low); }
};

struct TailCurve {
    std::vector<std::uint64_t> thresholds;
    std::vector<double> survival;
    std::optional<double> hill_index;
    double hill_fraction = 0;
    std::vector<std::pair<std::uint64_t, double>> hill_curve;  // (k, alpha_k)
    std::string diagnostic;
};

std::vector<StoppingSample> run_trials(const GapState& start, int pair_index,
                                       const McOptions& opts);

EstimateSummary summarize_samples(const std::vector<StoppingSample>& samples,
                                  const McOptions& opts);

EstimateSummary estimate_tie_time(const GapState& start, const McOptions& opts);

struct PairEstimate {
    EstimateSummary estimate;
    double reference = 0;   // m * a_i * a_{i+1}
    bool consistent = false;  // reference within 4 half-widths
};

PairEstimate estimate_pair_tie_time(const GapState& start, int pair_index,
                                    const McOptions& opts);

struct LimitRow {
    std::int64_t far_value = 0;
    EstimateSummary estimate;
};

struct LimitTable {
    std::vector<LimitRow> rows;
    double limit_value = 0;  // m * a_i * a_{i+1}
};

// Fixes (a_i, a_{i+1}) and pushes every other gap to each far value; the
// estimates should climb toward m * a_i * a_{i+1}.
LimitTable check_limit_trend(int m, int pair_index,
                             std::pair<std::int64_t, std::int64_t> fixed_pair,
                             const std::vector<std::int64_t>& far_values,
                             const McOptions& opts);

TailCurve estimate_tail(const GapState& start, const std::vector<std::uint64_t>& thresholds,
                        const McOptions& opts, double hill_fraction);

struct StoppedProductPoint {
    std::uint64_t n = 0;
    double estimate = 0;      // mean of A(T_n) B(T_n)
    double survival = 0;      // empirical P(T > n)
    double holder_bound = 0;  // (ab)^{4/3} (a+b)^{4/3} survival^{1/3}
};

// Three teams only: the product of the two gaps at the truncated stopping
// time min(T, n), which must decay to zero as n grows.
std::vector<StoppedProductPoint> estimate_stopped_product(
    const GapState& start, const std::vector<std::uint64_t>& n_list, const McOptions& opts);

struct GapWaitingSummary {
    std::uint64_t count = 0;
    double mean = 0;                          // reference m/3
    std::map<int, double> sum_second_moment;  // N -> mean of (G_1+...+G_N)^2
};

// Waiting times between steps that move a fixed adjacent pair; three of the
// m winners move it, so the gaps are geometric with success chance 3/m.
GapWaitingSummary estimate_gap_waiting(int m, const std::vector<int>& sum_sizes,
                                       std::uint64_t count, std::uint64_t seed);

}  // namespace tietime
