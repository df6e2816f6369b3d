#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tietime/rational.hpp"

namespace tietime {

// Polynomial in the gap coordinates with exact rational coefficients.
// Exponent vectors are dense (length = variable count); absent terms are 0.
class StatePolynomial {
  public:
    using Terms = std::map<std::vector<int>, Rational>;

    StatePolynomial() = default;
    explicit StatePolynomial(int var_count) : vars_(var_count) {}

    static StatePolynomial constant(int var_count, const Rational& c);
    static StatePolynomial variable(int var_count, int slot);  // 0-based slot
    static StatePolynomial monomial(std::vector<int> exponents, const Rational& c);

    int var_count() const { return vars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    StatePolynomial& operator+=(const StatePolynomial& rhs);
    StatePolynomial& operator-=(const StatePolynomial& rhs);
    StatePolynomial operator+(const StatePolynomial& rhs) const;
    StatePolynomial operator-(const StatePolynomial& rhs) const;
    StatePolynomial operator*(const StatePolynomial& rhs) const;
    StatePolynomial scaled(const Rational& c) const;

    // Substitute variable `slot` -> variable + shift (binomial expansion).
    StatePolynomial shifted(int slot, int shift) const;

    Rational eval(std::span<const std::int64_t> point) const;

    void add_term(std::vector<int> exponents, const Rational& c);

    bool operator==(const StatePolynomial& rhs) const {
        return vars_ == rhs.vars_ && terms_ == rhs.terms_;
    }

  private:
    int vars_ = 0;
    Terms terms_;
};

// (1/m) * sum over winners k of h(state + delta_k), as a polynomial.
StatePolynomial one_step_expectation(const StatePolynomial& h, int m);

// one_step_expectation(h) - h, as a polynomial.
StatePolynomial drift_polynomial(const StatePolynomial& h, int m);

// Exact drift at a single state, computed by direct evaluation at the m
// shifted states (independent of the symbolic route above).
Rational drift_at(const StatePolynomial& h, int m, std::span<const std::int64_t> state);

}  // namespace tietime
