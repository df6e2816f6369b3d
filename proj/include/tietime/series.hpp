#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tietime/linalg.hpp"
#include "tietime/rational.hpp"

namespace tietime {

enum class Sign { plus, minus };

// Truncated multivariate power series with exact rational coefficients.
// Only exponent vectors with total degree <= degree_cap are stored;
// arithmetic truncates products back to the cap.
class MultiSeries {
  public:
    using Coeffs = std::map<std::vector<int>, Rational>;

    MultiSeries() = default;
    MultiSeries(int var_count, int degree_cap)
        : vars_(var_count), cap_(degree_cap) {}

    static MultiSeries constant(int var_count, int degree_cap, const Rational& c);
    static MultiSeries monomial(std::vector<int> exponents, const Rational& c,
                                int degree_cap);

    int var_count() const { return vars_; }
    int degree_cap() const { return cap_; }
    const Coeffs& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    Rational coefficient(const std::vector<int>& exponents) const;
    void add_coefficient(std::vector<int> exponents, const Rational& c);

    // Returns a copy truncated (or re-capped) to the given total degree.
    MultiSeries truncated(int new_cap) const;

    MultiSeries& operator+=(const MultiSeries& rhs);
    MultiSeries& operator-=(const MultiSeries& rhs);
    MultiSeries operator+(const MultiSeries& rhs) const;
    MultiSeries operator-(const MultiSeries& rhs) const;
    MultiSeries operator*(const MultiSeries& rhs) const;
    MultiSeries scaled(const Rational& c) const;

    bool operator==(const MultiSeries& rhs) const {
        return vars_ == rhs.vars_ && coeffs_ == rhs.coeffs_;
    }

  private:
    int vars_ = 0;
    int cap_ = 0;
    Coeffs coeffs_;
};

// Coefficient of x^k in 1/(1 +- x)^i.
Rational inv_power_coeff(Sign sign, int i, int k);

// Generating sequence of f after substituting u_slot -> u_slot/(1 +- u_slot)
// (slot is 1-based). Lower-triangular in the slot exponent, hence exact
// per-coefficient under truncation.
MultiSeries substitute_slot(Sign sign, int slot, const MultiSeries& f);

// Do the two substitutions commute on this series through its cap?
bool check_commutativity(Sign sign1, int slot1, Sign sign2, int slot2,
                         const MultiSeries& f);

// Residual of the reciprocal-coordinate generator equation for k = f.var_count()
// teams-minus-one coordinates: zero through the cap means x_1...x_k f(1/x)
// drifts by exactly -gamma, i.e. generates a tie-time martingale.
MultiSeries generator_residual(const MultiSeries& f, const Rational& gamma);

// Residual of the same equation for the ansatz F = G/(x+z) in three
// coordinates, written in reciprocal variables and cleared of denominators
// (degree-4 polynomial prefactors).
MultiSeries pole_ansatz_residual(const MultiSeries& g, const Rational& gamma);

struct LinearFamilyResult {
    enum class Status { solved, inconsistent };
    Status status = Status::inconsistent;
    std::optional<MultiSeries> solution;  // coefficients of f (or G)
    std::optional<Rational> gamma;
    std::size_t nullity = 0;
    // null space of the homogeneous part, as (series, gamma) pairs
    std::vector<std::pair<MultiSeries, Rational>> nullspace;
    // on inconsistency: equation combination with zero lhs, nonzero rhs
    std::vector<Rational> certificate;
    double residual_norm = 0.0;  // numeric least-squares diagnostic
    std::size_t equations = 0;
    std::size_t unknowns = 0;
};

// Polynomial family search for the generator equation: coefficients of f
// (total degree <= max_degree) and gamma are unknowns, one linear equation
// per residual coefficient through max_degree + 2. A nonzero `normalize_c`
// pins the constant term f(0,...,0) = c; zero drops the normalization and
// returns the homogeneous solution space instead.
LinearFamilyResult solve_generator_family(int k, int max_degree,
                                          const Rational& normalize_c);

// Same search for the pole ansatz G (three variables, equations through
// max_degree + 4).
LinearFamilyResult solve_pole_family(int max_degree, const Rational& normalize_c);

// Binds the series formalism to the lattice drift oracle. `theta` must have
// all exponents <= 1 so that x_1...x_k * u^theta is a polynomial H; returns
// true iff the series residual of u^theta vanishes exactly when drift(H) ==
// -gamma at every test state.
bool crosscheck_with_drift(const std::vector<int>& theta, const Rational& gamma,
                           int degree, const std::vector<std::vector<std::int64_t>>& test_states);

// JSON series files: array of {"exponents": [...], "coeff": "p/q"}.
std::string series_to_json(const MultiSeries& f);
MultiSeries series_from_json(const std::string& text, int degree_cap);

}  // namespace tietime
