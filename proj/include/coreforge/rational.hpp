#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace coreforge {

/// Exact rational number. GMP keeps the value canonical (lowest terms,
/// positive denominator).
using Rational = mpq_class;

inline Rational make_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational rational_from_strings(const std::string& num, const std::string& den) {
    mpz_class n(num), d(den);
    if (d == 0) throw std::invalid_argument("zero denominator");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

inline std::string num_string(const Rational& r) { return r.get_num().get_str(); }
inline std::string den_string(const Rational& r) { return r.get_den().get_str(); }

inline std::string rational_to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// Best rational approximation of a floating-point value with denominator at
/// most `max_den`, via continued-fraction convergents.
inline Rational rationalize(double value, std::uint64_t max_den = 1000000) {
    if (!std::isfinite(value)) throw std::invalid_argument("cannot rationalize a non-finite value");
    bool negative = value < 0;
    double v = negative ? -value : value;

    mpz_class p_prev = 1, q_prev = 0;  // convergent h_{-1}/k_{-1}
    double x = v;
    mpz_class p_cur = mpz_class(std::floor(x)), q_cur = 1;
    mpz_class cap(static_cast<unsigned long>(max_den));

    double frac = x - std::floor(x);
    for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
        x = 1.0 / frac;
        double a = std::floor(x);
        if (a > 9e18) break;
        mpz_class ai(a);
        mpz_class p_next = ai * p_cur + p_prev;
        mpz_class q_next = ai * q_cur + q_prev;
        if (q_next > cap) break;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        frac = x - a;
    }
    Rational r(p_cur, q_cur);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

}  // namespace coreforge
