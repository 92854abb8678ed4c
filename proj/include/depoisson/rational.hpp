#ifndef DEPOISSON_RATIONAL_HPP
#define DEPOISSON_RATIONAL_HPP

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace depoisson {

// Exact arithmetic carriers. mpq_class keeps values canonical (lowest terms,
// positive denominator), which is exactly the invariant we need.
using Int = mpz_class;
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }

inline Int binomial(unsigned long n, unsigned long k) {
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline Int factorial(unsigned long n) {
    Int r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

/// Exact power with integer exponent (negative exponents invert).
inline Rational pow_rational(const Rational& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("pow_rational: 0^negative");
        Rational inv = 1 / base;
        return pow_rational(inv, -e);
    }
    Rational acc = 1, b = base;
    unsigned long n = static_cast<unsigned long>(e);
    while (n) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

/// Parses "p/q", "p", or a decimal string ("2.5", "-0.125") into an exact
/// rational. Decimal strings are read digit-by-digit, so the result is the
/// exact decimal value, not a binary approximation. Exponents ("1e-3") are
/// rejected here; use parse_number for values that may be floating.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
    if (s.find('/') != std::string::npos) {
        Rational q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("parse_rational: bad rational '" + s + "'");
        q.canonicalize();
        if (q.get_den() <= 0) throw std::invalid_argument("parse_rational: zero denominator in '" + s + "'");
        return q;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Rational q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("parse_rational: bad integer '" + s + "'");
        return q;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("parse_rational: bad decimal '" + s + "'");
    Int num;
    if (num.set_str(digits, 10) != 0) throw std::invalid_argument("parse_rational: bad decimal '" + s + "'");
    Int den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// True when the double is a finite value whose exact rational form has a
/// small representation (the usual case for hand-entered grid points).
inline bool is_simple_rational(double x, Rational* out = nullptr) {
    if (!std::isfinite(x)) return false;
    Rational q(x);  // exact binary-to-rational conversion
    q.canonicalize();
    if (mpz_sizeinbase(q.get_den().get_mpz_t(), 2) > 24) return false;
    if (out) *out = q;
    return true;
}

}  // namespace depoisson

#endif
