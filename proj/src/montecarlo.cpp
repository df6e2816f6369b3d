#include "tietime/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace tietime {

namespace {

void validate(const GapState& start, const McOptions& opts) {
    if (start.m < 2 || start.gaps.size() != static_cast<size_t>(start.m - 1)) {
        throw std::invalid_argument("gap vector length must be m-1");
    }
    if (opts.blocks < 1 || opts.trials < static_cast<std::uint64_t>(opts.blocks)) {
        throw std::invalid_argument("need trials >= blocks >= 1");
    }
    if (opts.workers < 1) throw std::invalid_argument("workers must be >= 1");
}

template <class Fn>
void parallel_ranges(std::uint64_t total, int workers, Fn&& fn) {
    if (workers <= 1 || total < 2) {
        fn(std::uint64_t{0}, total);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t lo = std::min<std::uint64_t>(total, w * chunk);
        const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
        if (lo == hi) continue;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

// Two-sided 95% order-statistic rank for the median of `b` block means:
// the largest l with P(Bin(b,1/2) < l) <= 0.025.
int median_rank_low(int b) {
    double term = std::ldexp(1.0, -b);  // P(X = 0)
    double cdf = 0.0;
    for (int k = 0; k < b; ++k) {
        if (cdf + term > 0.025) return k;  // ranks are 1-based; X_(k) is safe
        cdf += term;
        term *= static_cast<double>(b - k) / (k + 1);
    }
    return b / 2;
}

}  // namespace

std::vector<StoppingSample> run_trials(const GapState& start, int pair_index,
                                       const McOptions& opts) {
    validate(start, opts);
    std::vector<StoppingSample> samples(opts.trials);
    parallel_ranges(opts.trials, opts.workers, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            samples[t] = pair_index == 0
                             ? sample_tie_time(start, opts.seed, t, opts.horizon)
                             : sample_pair_tie_time(start, pair_index, opts.seed, t,
                                                    opts.horizon);
        }
    });
    return samples;
}

EstimateSummary summarize_samples(const std::vector<StoppingSample>& samples,
                                  const McOptions& opts) {
    EstimateSummary out;
    out.trials = samples.size();
    out.horizon = opts.horizon;
    out.block_count = opts.blocks;

    double total = 0;
    for (const auto& s : samples) {
        total += static_cast<double>(s.steps);
        if (!s.absorbed) ++out.truncated;
    }
    out.mean = total / static_cast<double>(samples.size());
    out.biased_low = out.truncated > 0;

    const std::uint64_t block_size = samples.size() / opts.blocks;
    std::vector<double> block_means(opts.blocks, 0.0);
    for (int b = 0; b < opts.blocks; ++b) {
        const std::uint64_t lo = b * block_size;
        const std::uint64_t hi = (b + 1 == opts.blocks) ? samples.size() : lo + block_size;
        double acc = 0;
        for (std::uint64_t t = lo; t < hi; ++t) acc += static_cast<double>(samples[t].steps);
        block_means[b] = acc / static_cast<double>(hi - lo);
    }
    std::sort(block_means.begin(), block_means.end());
    const int lo_rank = std::max(1, median_rank_low(opts.blocks));
    const int hi_rank = opts.blocks + 1 - lo_rank;
    out.mom_ci_low = std::min(block_means[lo_rank - 1], out.mean);
    out.mom_ci_high = std::max(block_means[hi_rank - 1], out.mean);
    return out;
}

EstimateSummary estimate_tie_time(const GapState& start, const McOptions& opts) {
    if (is_tied(start)) throw std::invalid_argument("start state is already tied");
    auto summary = summarize_samples(run_trials(start, 0, opts), opts);
    if (start.m == 2) {
        summary.warning =
            "two teams: the tie time has infinite mean; this truncated estimate is "
            "meaningless, use the tail diagnostics instead";
    }
    return summary;
}

PairEstimate estimate_pair_tie_time(const GapState& start, int pair_index,
                                    const McOptions& opts) {
    PairEstimate out;
    out.estimate = summarize_samples(run_trials(start, pair_index, opts), opts);
    out.reference = static_cast<double>(start.m) *
                    static_cast<double>(start.gaps[pair_index - 1]) *
                    static_cast<double>(start.gaps[pair_index]);
    out.consistent = std::fabs(out.estimate.mean - out.reference) <=
                     4.0 * out.estimate.half_width();
    return out;
}

LimitTable check_limit_trend(int m, int pair_index,
                             std::pair<std::int64_t, std::int64_t> fixed_pair,
                             const std::vector<std::int64_t>& far_values,
                             const McOptions& opts) {
    if (m < 4) throw std::invalid_argument("limit trend needs at least 4 teams");
    if (pair_index < 1 || pair_index > m - 2) throw std::invalid_argument("bad pair index");
    LimitTable table;
    table.limit_value = static_cast<double>(m) * static_cast<double>(fixed_pair.first) *
                        static_cast<double>(fixed_pair.second);
    for (const auto v : far_values) {
        if (v < 1) throw std::invalid_argument("far values must be positive");
        GapState s;
        s.m = m;
        s.gaps.assign(m - 1, v);
        s.gaps[pair_index - 1] = fixed_pair.first;
        s.gaps[pair_index] = fixed_pair.second;
        table.rows.push_back({v, estimate_tie_time(s, opts)});
    }
    return table;
}

TailCurve estimate_tail(const GapState& start, const std::vector<std::uint64_t>& thresholds,
                        const McOptions& opts, double hill_fraction) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw std::invalid_argument("thresholds must be increasing");
    }
    if (!thresholds.empty() && thresholds.back() >= opts.horizon) {
        throw std::invalid_argument("thresholds must stay below the horizon");
    }
    if (hill_fraction <= 0 || hill_fraction > 0.2) {
        throw std::invalid_argument("hill fraction must be in (0, 0.2]");
    }
    const auto samples = run_trials(start, 0, opts);

    TailCurve out;
    out.thresholds = thresholds;
    out.hill_fraction = hill_fraction;
    std::vector<double> steps(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        steps[i] = static_cast<double>(samples[i].steps);
    }
    std::sort(steps.begin(), steps.end());
    for (const auto n : thresholds) {
        // count of samples with T > n (truncated samples sit at the horizon > n)
        const auto it = std::upper_bound(steps.begin(), steps.end(), static_cast<double>(n));
        out.survival.push_back(static_cast<double>(steps.end() - it) /
                               static_cast<double>(steps.size()));
    }

    auto hill_at = [&](std::uint64_t k) -> std::optional<double> {
        if (k < 5 || k + 1 >= steps.size()) return std::nullopt;
        const double ref = steps[steps.size() - 1 - k];
        if (ref <= 0) return std::nullopt;
        double acc = 0;
        for (std::uint64_t i = 0; i < k; ++i) {
            acc += std::log(steps[steps.size() - 1 - i] / ref);
        }
        if (acc <= 0) return std::nullopt;
        return static_cast<double>(k) / acc;
    };
    const auto k_main = static_cast<std::uint64_t>(hill_fraction * samples.size());
    for (const std::uint64_t k : {k_main / 4, k_main / 2, k_main, 2 * k_main}) {
        if (const auto a = hill_at(k)) out.hill_curve.push_back({k, *a});
    }
    out.hill_index = hill_at(k_main);
    if (!out.hill_index) {
        out.diagnostic = "too few exceedances for a tail index at this fraction";
    }
    return out;
}

std::vector<StoppedProductPoint> estimate_stopped_product(
    const GapState& start, const std::vector<std::uint64_t>& n_list, const McOptions& opts) {
    if (start.m != 3) throw std::invalid_argument("stopped product is a three-team diagnostic");
    if (is_tied(start)) throw std::invalid_argument("start state is already tied");
    validate(start, opts);
    std::vector<std::uint64_t> ns = n_list;
    std::sort(ns.begin(), ns.end());
    const std::uint64_t n_max = ns.empty() ? 0 : ns.back();

    // per-trial products (0 once absorbed); reduced in trial order afterwards
    // so the result does not depend on the worker count
    std::vector<std::int64_t> per_trial(opts.trials * ns.size(), 0);
    parallel_ranges(opts.trials, opts.workers, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            std::int64_t* row = per_trial.data() + t * ns.size();
            WinnerStream ws(opts.seed, t);
            std::int64_t a = start.gaps[0], b = start.gaps[1];
            std::size_t next = 0;
            while (next < ns.size() && ns[next] == 0) row[next++] = a * b;
            for (std::uint64_t n = 1; n <= n_max && next < ns.size(); ++n) {
                switch (ws.winner(n, 3)) {
                    case 1: --a; break;
                    case 2: ++a; --b; break;
                    default: ++b; break;
                }
                if (a == 0 || b == 0) break;  // product stays 0 from T onward
                while (next < ns.size() && ns[next] == n) row[next++] = a * b;
            }
        }
    });
    std::vector<double> product_sum(ns.size(), 0.0);
    std::vector<std::uint64_t> alive_count(ns.size(), 0);
    for (std::uint64_t t = 0; t < opts.trials; ++t) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const std::int64_t p = per_trial[t * ns.size() + i];
            product_sum[i] += static_cast<double>(p);
            if (p > 0) ++alive_count[i];
        }
    }

    const double a0 = static_cast<double>(start.gaps[0]);
    const double b0 = static_cast<double>(start.gaps[1]);
    std::vector<StoppedProductPoint> out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        StoppedProductPoint p;
        p.n = ns[i];
        p.estimate = product_sum[i] / static_cast<double>(opts.trials);
        p.survival = static_cast<double>(alive_count[i]) / static_cast<double>(opts.trials);
        p.holder_bound = std::pow(a0 * b0 * (a0 + b0), 4.0 / 3.0) * std::cbrt(p.survival);
        out.push_back(p);
    }
    return out;
}

GapWaitingSummary estimate_gap_waiting(int m, const std::vector<int>& sum_sizes,
                                       std::uint64_t count, std::uint64_t seed) {
    if (m < 4) throw std::invalid_argument("waiting times need at least 4 teams");
    if (count < 1) throw std::invalid_argument("need at least one waiting time");
    GapWaitingSummary out;
    out.count = count;

    // winners 1, 2, 3 are exactly the ones that move the pair (A_1, A_2)
    WinnerStream ws(seed, 0);
    std::vector<std::uint64_t> waits;
    waits.reserve(count);
    std::uint64_t step = 0, last = 0;
    while (waits.size() < count) {
        ++step;
        if (ws.winner(step, m) <= 3) {
            waits.push_back(step - last);
            last = step;
        }
    }
    double acc = 0;
    for (const auto g : waits) acc += static_cast<double>(g);
    out.mean = acc / static_cast<double>(count);

    for (const int n : sum_sizes) {
        if (n < 1) throw std::invalid_argument("sum sizes must be positive");
        const std::uint64_t groups = count / n;
        if (groups == 0) continue;
        double sq = 0;
        for (std::uint64_t g = 0; g < groups; ++g) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += static_cast<double>(waits[g * n + j]);
            sq += s * s;
        }
        out.sum_second_moment[n] = sq / static_cast<double>(groups);
    }
    return out;
}

}  // namespace tietime
