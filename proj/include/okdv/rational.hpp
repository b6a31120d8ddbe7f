#ifndef OKDV_RATIONAL_HPP
#define OKDV_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace okdv {

// Exact rational scalar. mpq_class keeps values canonical (lowest terms,
// positive denominator), which is the invariant everything downstream
// relies on.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

// "p/q", or just "p" when q == 1.
inline std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat parse_rat(const std::string& text) {
    Rat r;
    if (r.set_str(text, 10) != 0)
        throw std::invalid_argument("parse_rat: bad rational '" + text + "'");
    r.canonicalize();
    if (r.get_den() == 0) throw std::invalid_argument("parse_rat: zero denominator");
    return r;
}

// n!! with the usual conventions (-1)!! = 0!! = 1.
inline Rat double_factorial(long n) {
    if (n < -1) throw std::invalid_argument("double_factorial: n < -1");
    mpz_class acc = 1;
    for (long k = n; k >= 2; k -= 2) acc *= k;
    return Rat(acc);
}

inline Rat factorial(long n) {
    if (n < 0) throw std::invalid_argument("factorial: n < 0");
    mpz_class acc = 1;
    for (long k = 2; k <= n; ++k) acc *= k;
    return Rat(acc);
}

inline Rat binomial(long n, long k) {
    if (k < 0 || k > n) return Rat(0);
    mpz_class acc = 1;
    for (long i = 0; i < k; ++i) {
        acc *= (n - i);
        acc /= (i + 1);
    }
    return Rat(acc);
}

// Catalan number C_m = binom(2m, m) / (m + 1).
inline Rat catalan_number(long m) {
    return binomial(2 * m, m) / Rat(m + 1);
}

inline Rat pow_rat(const Rat& base, long e) {
    if (e < 0) {
        if (is_zero(base)) throw std::invalid_argument("pow_rat: 0^negative");
        Rat inv = 1 / base;
        return pow_rat(inv, -e);
    }
    Rat acc = 1, b = base;
    long n = e;
    while (n > 0) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

}  // namespace okdv

#endif
