#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tietime/rational.hpp"

namespace tietime {

// Outcome of exact Gauss-Jordan elimination on A x = b. When the system is
// inconsistent, `certificate` is a rational row combination c with
// c^T A = 0 and c^T b != 0, extracted from the eliminated augmented block.
struct RationalSystemResult {
    bool consistent = false;
    std::vector<Rational> particular;               // one solution (free vars = 0)
    std::vector<std::vector<Rational>> nullspace;   // basis of A x = 0
    std::vector<Rational> certificate;              // empty when consistent
    std::size_t rank = 0;
};

RationalSystemResult solve_rational_system(std::vector<std::vector<Rational>> a,
                                           std::vector<Rational> b);

// Square sparse integer system with entries addressed by column.
struct SparseIntSystem {
    int n = 0;
    std::vector<std::vector<std::pair<int, long>>> rows;
};

// Exact solve of a nonsingular sparse integer system with rational rhs,
// via LU mod a word-size prime plus p-adic lifting and rational
// reconstruction. The candidate is verified against the system exactly
// before being returned.
std::vector<Rational> solve_sparse_exact(const SparseIntSystem& a,
                                         const std::vector<Rational>& b);

// Banded double-precision LU (no pivoting; intended for diagonally
// dominant systems). `kl`/`ku` are the lower/upper bandwidths. Factors in
// place and solves for each rhs column.
class BandedLU {
  public:
    BandedLU(int n, int kl, int ku);
    double& at(int row, int col);          // only within the band
    void factor();
    void solve(std::vector<double>& rhs) const;

  private:
    int n_, kl_, ku_;
    std::vector<double> band_;  // row-major, width kl+ku+1
    bool factored_ = false;
};

}  // namespace tietime
