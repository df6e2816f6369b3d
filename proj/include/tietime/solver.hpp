#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tietime/rational.hpp"

namespace tietime {

// Exterior data supplied on the faces where a gap exceeds the radius.
// `zero` under-estimates the nonnegative solution, `upper_bound` uses
// m * min(adjacent products) which dominates it, so the two bracket the
// expected tie time. `closed_form` (three teams only) uses the exact 3ab.
enum class BoundaryPolicy { zero, upper_bound, closed_form, custom };

struct SolverGrid {
    int m = 0;
    std::int64_t radius = 0;
    BoundaryPolicy policy = BoundaryPolicy::zero;
    std::function<Rational(std::span<const std::int64_t>)> custom_value;
};

enum class SolveMethod { gauss_seidel, direct_banded, exact_rational };

struct SolveOptions {
    double tol = 1e-10;
    std::uint64_t max_sweeps = 4'000'000;
    double relax = 1.0;  // Gauss-Seidel relaxation factor
    SolveMethod method = SolveMethod::gauss_seidel;
};

// Interior field over [1..R]^{m-1} plus the max recurrence residual.
struct SolveResult {
    int m = 0;
    std::int64_t radius = 0;
    std::vector<double> values;     // flat, last coordinate fastest
    std::vector<Rational> exact;    // populated in exact mode only
    double residual = 0.0;
    std::uint64_t iterations = 0;

    std::size_t index_of(std::span<const std::int64_t> state) const;
    double value_at(std::span<const std::int64_t> state) const;
    std::vector<std::int64_t> state_of(std::size_t index) const;
};

// Expected tie time on the truncated lattice: solves
// v(s) = 1 + (1/m) sum_k v(s + delta_k) with v = 0 at tied states and
// policy data outside the box.
SolveResult solve_expected_time(const SolverGrid& grid, const SolveOptions& opts);

// Truncated second-moment field from a zero-policy expected-time solve on
// the same grid: S(s) = 1 + (1/m) sum_k [2 tau(s_k) + S(s_k)] with zero
// exterior data. Lower-bounds E[T^2] from every interior state.
SolveResult solve_second_moment(const SolverGrid& grid, const SolveResult& expected_time,
                                const SolveOptions& opts);

struct Bracket {
    SolveResult lower;
    SolveResult upper;
    double lower_value = 0.0;
    double upper_value = 0.0;
};

// (zero-policy, upper-policy) sandwich of the expected tie time at `gaps`.
Bracket bracket_expected_time(int m, const std::vector<std::int64_t>& gaps,
                              std::int64_t radius, const SolveOptions& opts);

// 3ab: exact expected tie time for three teams.
Rational closed_form_three_teams(std::int64_t a, std::int64_t b);

}  // namespace tietime
