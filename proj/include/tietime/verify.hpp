#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tietime/polynomial.hpp"
#include "tietime/rational.hpp"

namespace tietime {

struct DriftFailure {
    std::vector<std::int64_t> state;
    int pair_index = 0;  // 1-based; 0 when not pair-specific
    int time = -1;       // step index for time-dependent checks, -1 otherwise
    Rational expected;
    Rational actual;
    std::string what;
};

// Result of one exact verification sweep. failures empty <=> the identity
// holds at every covered state (no tolerances anywhere in this module).
struct DriftReport {
    std::string suite;
    int m = 0;
    std::int64_t grid_hi = 0;  // grid is [1..grid_hi] per coordinate
    std::uint64_t states_checked = 0;
    std::vector<DriftFailure> failures;
    Rational max_slack_mismatch = 0;
    std::map<std::string, std::uint64_t> case_counts;

    bool ok() const { return failures.empty(); }
};

// A_i * A_{i+1} in the m-1 gap variables (i is 1-based).
StatePolynomial pair_product(int m, int i);

// A_i^2 A_{i+1}^2 + (2/3) A_i A_{i+1} (A_i^2 + A_{i+1}^2).
StatePolynomial pair_quartic(int m, int i);

// Weight used by the four-team product supermartingale:
// max(x,y) off the diagonal, 2x^2/(2x-1) on it. Defined for x,y >= 1.
Rational phi_weight(std::int64_t x, std::int64_t y);

// drift(A_i A_{i+1}) == -1/m for every pair, so the n/m-compensated pair
// products are martingales.
DriftReport verify_pair_martingales(int m, std::int64_t grid_hi);

// One-step expectation of min_i(A_i A_{i+1}) + 1/m never exceeds the
// current min: the minimum of the compensated pair products is a
// supermartingale.
DriftReport verify_min_supermartingale(int m, std::int64_t grid_hi);

// Casework for the weighted product inequality on (x,y,z) in [1..N]^3:
// equality in cases x=z, x>=z+2, x<=z-2; slack exactly y when |x-z|=1.
DriftReport verify_phi_supermartingale(std::int64_t grid_hi);

// The three one-step moment identities for A^2B^2, A^3B, AB^3.
DriftReport verify_moment_identities(int m, std::int64_t grid_hi);

// drift(quartic) == (4/m) A_i A_{i+1} - 1/(3m).
DriftReport verify_quartic_drift(int m, std::int64_t grid_hi);

// Time-inhomogeneous check: the quartic with its n-dependent compensators
// is a martingale, verified for each n in [0..n_max].
DriftReport verify_time_squared_martingale(int m, std::int64_t grid_hi, int n_max);

}  // namespace tietime
