#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace brs {

// Exact rational scalar. GMP backs every value that is not known to be dyadic.
using Rat = mpq_class;

inline Rat rat_of(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat rat_parse(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline double rat_double(const Rat& r) { return r.get_d(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline int rat_sign(const Rat& r) { return sgn(r); }

// r^k for integer k >= 0.
inline Rat rat_pow(const Rat& r, unsigned k) {
    Rat acc = 1, base = r;
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

// Exact dyadic upper bound of sqrt(r) with `bits` fractional bits; r >= 0.
inline Rat rat_sqrt_upper(const Rat& r, int bits = 48) {
    if (sgn(r) < 0) throw std::domain_error("rat_sqrt_upper: negative input");
    if (sgn(r) == 0) return Rat(0);
    mpz_class num = r.get_num(), den = r.get_den();
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), num.get_mpz_t(), unsigned(2 * bits));
    mpz_class g;
    mpz_cdiv_q(g.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), g.get_mpz_t());
    if (s * s < g) s += 1;
    mpz_class pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), 2, unsigned(bits));
    Rat out(s, pow);
    out.canonicalize();
    return out;
}

// Dyadic rational m / 2^e, normalized so that m is odd, or m == 0 and e == 0.
// Negative e encodes values with an even integer part (e.g. 2 = 1/2^-1).
struct Dyadic {
    long long m = 0;
    int e = 0;

    Dyadic() = default;
    Dyadic(long long mantissa, int exponent) : m(mantissa), e(exponent) { normalize(); }

    static Dyadic zero() { return Dyadic(); }
    static Dyadic one() { return Dyadic(1, 0); }
    static Dyadic integer(long long n) { return Dyadic(n, 0); }
    // 2^{-k}; k may be negative.
    static Dyadic pow2(int k) { return Dyadic(1, k); }

    void normalize() {
        if (m == 0) {
            e = 0;
            return;
        }
        while ((m & 1) == 0) {
            m >>= 1;
            --e;
        }
    }

    bool is_zero() const { return m == 0; }
    bool is_one() const { return m == 1 && e == 0; }

    Rat to_rat() const {
        Rat r(m);
        if (e > 0)
            r /= rat_pow(Rat(2), unsigned(e));
        else if (e < 0)
            r *= rat_pow(Rat(2), unsigned(-e));
        return r;
    }

    double to_double() const { return double(m) * std::pow(2.0, -double(e)); }

    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        __int128 p = __int128(a.m) * __int128(b.m);
        if (p > __int128(INT64_MAX) || p < __int128(INT64_MIN))
            throw std::overflow_error("dyadic multiply overflow");
        return Dyadic((long long)p, a.e + b.e);
    }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        if (a.m == 0) return b;
        if (b.m == 0) return a;
        int e = a.e > b.e ? a.e : b.e;
        __int128 s = (__int128(a.m) << (e - a.e)) + (__int128(b.m) << (e - b.e));
        if (s > __int128(INT64_MAX) || s < __int128(INT64_MIN))
            throw std::overflow_error("dyadic add overflow");
        return Dyadic((long long)s, e);
    }

    friend Dyadic operator-(const Dyadic& a) { return Dyadic(-a.m, a.e); }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

    friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.m == b.m && a.e == b.e; }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }

    // Total order consistent with the rational value.
    friend bool operator<(const Dyadic& a, const Dyadic& b) {
        Dyadic d = b - a;
        return d.m > 0;
    }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return a == b || a < b; }

    std::string str() const { return to_rat().get_str(); }
};

// Element of the quadratic field Q[sqrt(2)]: value = a + b*sqrt(2).
// Used wherever (theta |I|)^{1/2} factors must stay exact at p = 2.
struct Root2Sum {
    Rat a = 0, b = 0;

    Root2Sum() = default;
    Root2Sum(Rat a_, Rat b_) : a(std::move(a_)), b(std::move(b_)) {}
    static Root2Sum of(const Rat& r) { return Root2Sum(r, 0); }
    // 2^{-k/2} for integer k (possibly negative).
    static Root2Sum pow2_half(int k) {
        if (k % 2 == 0) return Root2Sum(Dyadic::pow2(k / 2).to_rat(), 0);
        // 2^{-k/2} = 2^{-(k+1)/2} * sqrt(2)
        return Root2Sum(0, Dyadic::pow2((k + 1) / 2).to_rat());
    }

    friend Root2Sum operator+(const Root2Sum& x, const Root2Sum& y) {
        return Root2Sum(x.a + y.a, x.b + y.b);
    }
    friend Root2Sum operator-(const Root2Sum& x, const Root2Sum& y) {
        return Root2Sum(x.a - y.a, x.b - y.b);
    }
    friend Root2Sum operator*(const Root2Sum& x, const Root2Sum& y) {
        return Root2Sum(x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a);
    }
    friend Root2Sum operator*(const Root2Sum& x, const Rat& c) { return Root2Sum(x.a * c, x.b * c); }

    // Sign of a + b*sqrt(2), computed exactly.
    int sign() const {
        int sa = sgn(a), sb = sgn(b);
        if (sa == 0) return sb;
        if (sb == 0) return sa;
        if (sa == sb) return sa;
        // Opposite signs: compare a^2 with 2 b^2; sign follows the larger term.
        Rat d = a * a - 2 * b * b;
        int sd = sgn(d);
        if (sd == 0) return 0;
        return sd > 0 ? sa : sb;
    }

    bool operator<(const Rat& c) const { return (*this - of(c)).sign() < 0; }
    bool operator<=(const Rat& c) const { return (*this - of(c)).sign() <= 0; }

    double to_double() const { return rat_double(a) + rat_double(b) * 1.4142135623730951; }
};

}  // namespace brs
