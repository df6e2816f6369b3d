#include "tietime/polynomial.hpp"

#include <stdexcept>

#include "tietime/process.hpp"

namespace tietime {

StatePolynomial StatePolynomial::constant(int var_count, const Rational& c) {
    StatePolynomial p(var_count);
    p.add_term(std::vector<int>(var_count, 0), c);
    return p;
}

StatePolynomial StatePolynomial::variable(int var_count, int slot) {
    if (slot < 0 || slot >= var_count) throw std::invalid_argument("bad variable slot");
    StatePolynomial p(var_count);
    std::vector<int> e(var_count, 0);
    e[slot] = 1;
    p.add_term(std::move(e), Rational(1));
    return p;
}

StatePolynomial StatePolynomial::monomial(std::vector<int> exponents, const Rational& c) {
    StatePolynomial p(static_cast<int>(exponents.size()));
    p.add_term(std::move(exponents), c);
    return p;
}

void StatePolynomial::add_term(std::vector<int> exponents, const Rational& c) {
    if (static_cast<int>(exponents.size()) != vars_) {
        throw std::invalid_argument("exponent vector length mismatch");
    }
    auto it = terms_.find(exponents);
    if (it == terms_.end()) {
        if (c != 0) terms_.emplace(std::move(exponents), c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

StatePolynomial& StatePolynomial::operator+=(const StatePolynomial& rhs) {
    for (const auto& [e, c] : rhs.terms_) add_term(e, c);
    return *this;
}

StatePolynomial& StatePolynomial::operator-=(const StatePolynomial& rhs) {
    for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
    return *this;
}

StatePolynomial StatePolynomial::operator+(const StatePolynomial& rhs) const {
    StatePolynomial out = *this;
    out += rhs;
    return out;
}

StatePolynomial StatePolynomial::operator-(const StatePolynomial& rhs) const {
    StatePolynomial out = *this;
    out -= rhs;
    return out;
}

StatePolynomial StatePolynomial::operator*(const StatePolynomial& rhs) const {
    StatePolynomial out(vars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            std::vector<int> e(vars_);
            for (int i = 0; i < vars_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(std::move(e), ca * cb);
        }
    }
    return out;
}

StatePolynomial StatePolynomial::scaled(const Rational& c) const {
    StatePolynomial out(vars_);
    if (c == 0) return out;
    for (const auto& [e, coef] : terms_) out.add_term(e, coef * c);
    return out;
}

StatePolynomial StatePolynomial::shifted(int slot, int shift) const {
    // (x + s)^n expanded with binomial coefficients
    StatePolynomial out(vars_);
    for (const auto& [e, c] : terms_) {
        const int n = e[slot];
        mpz_class binom = 1;
        mpz_class spow = 1;
        for (int j = 0; j <= n; ++j) {
            // term: C(n, j) * shift^j * x^{n-j}
            std::vector<int> en = e;
            en[slot] = n - j;
            out.add_term(std::move(en), c * Rational(binom * spow));
            binom = binom * (n - j) / (j + 1);
            spow *= shift;
        }
    }
    return out;
}

Rational StatePolynomial::eval(std::span<const std::int64_t> point) const {
    if (static_cast<int>(point.size()) != vars_) {
        throw std::invalid_argument("evaluation point length mismatch");
    }
    Rational acc = 0;
    for (const auto& [e, c] : terms_) {
        mpz_class mono = 1;
        for (int i = 0; i < vars_; ++i) {
            for (int k = 0; k < e[i]; ++k) mono *= point[i];
        }
        acc += c * Rational(mono);
    }
    return acc;
}

StatePolynomial one_step_expectation(const StatePolynomial& h, int m) {
    if (h.var_count() != m - 1) {
        throw std::invalid_argument("polynomial must have m-1 variables");
    }
    StatePolynomial sum(h.var_count());
    for (const auto& d : step_distribution(m)) {
        StatePolynomial shifted = h;
        for (int slot = 0; slot < m - 1; ++slot) {
            if (d.delta[slot] != 0) shifted = shifted.shifted(slot, d.delta[slot]);
        }
        sum += shifted;
    }
    return sum.scaled(Rational(1, m));
}

StatePolynomial drift_polynomial(const StatePolynomial& h, int m) {
    return one_step_expectation(h, m) - h;
}

Rational drift_at(const StatePolynomial& h, int m, std::span<const std::int64_t> state) {
    if (h.var_count() != m - 1 || static_cast<int>(state.size()) != m - 1) {
        throw std::invalid_argument("state length must be m-1");
    }
    Rational sum = 0;
    std::vector<std::int64_t> s(state.begin(), state.end());
    for (const auto& d : step_distribution(m)) {
        for (int i = 0; i < m - 1; ++i) s[i] += d.delta[i];
        sum += h.eval(s);
        for (int i = 0; i < m - 1; ++i) s[i] -= d.delta[i];
    }
    return sum / m - h.eval(state);
}

}  // namespace tietime
