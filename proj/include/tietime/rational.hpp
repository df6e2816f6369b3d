#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tietime {

// All exact arithmetic in the project goes through GMP rationals.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Canonical "p/q" (or "p" for integers), used for all exact values in
// machine-readable output. Never a float.
inline std::string rational_to_string(const Rational& r) {
    return r.get_str();
}

// Accepts "p", "p/q", or a plain decimal like "0.25".
inline Rational rational_from_string(const std::string& s) {
    if (s.find('.') != std::string::npos) {
        // decimal -> exact rational over a power of ten
        const auto dot = s.find('.');
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const size_t frac_len = s.size() - dot - 1;
        mpz_class num(digits);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    Rational r;
    if (r.set_str(s, 10) != 0) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
    r.canonicalize();
    return r;
}

}  // namespace tietime
