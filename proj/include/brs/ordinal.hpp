#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace brs {

// Countable ordinal in hereditary Cantor normal form:
//   sum of w^exponent * coefficient with exponents strictly decreasing.
// The empty term list is 0. Everything stays below epsilon_0.
struct Ordinal {
    std::vector<std::pair<Ordinal, unsigned long long>> terms;

    Ordinal() = default;

    static Ordinal nat(unsigned long long n);
    static Ordinal omega();

    bool is_zero() const { return terms.empty(); }
    bool is_finite() const;

    friend bool operator==(const Ordinal& x, const Ordinal& y) { return x.terms == y.terms; }
};

// Negative / zero / positive, total order on CNF.
int compare(const Ordinal& x, const Ordinal& y);
inline bool operator<(const Ordinal& x, const Ordinal& y) { return compare(x, y) < 0; }
inline bool operator<=(const Ordinal& x, const Ordinal& y) { return compare(x, y) <= 0; }

// Coefficient of the exponent-0 term (the integer part).
unsigned long long kappa(const Ordinal& x);
// x with the exponent-0 term removed; limit_part(x) + kappa(x) == x.
Ordinal limit_part(const Ordinal& x);
bool is_limit(const Ordinal& x);
bool is_successor(const Ordinal& x);

// Ordinal (non-commutative) CNF addition.
Ordinal ordinal_add(const Ordinal& x, const Ordinal& y);
Ordinal successor(const Ordinal& x);

// Text form, e.g. "w^2*3+w+5", "w^(w)*2". Parsing normalizes via CNF
// addition, so "w+w" is accepted and comes back as "w*2".
Ordinal parse_ordinal(const std::string& text);
std::string format_ordinal(const Ordinal& x);

}  // namespace brs
