#include "brs/ordinal.hpp"

#include <cctype>
#include <stdexcept>

namespace brs {

Ordinal Ordinal::nat(unsigned long long n) {
    Ordinal o;
    if (n > 0) o.terms.push_back({Ordinal(), n});
    return o;
}

Ordinal Ordinal::omega() {
    Ordinal o;
    o.terms.push_back({nat(1), 1});
    return o;
}

bool Ordinal::is_finite() const {
    return terms.empty() || (terms.size() == 1 && terms[0].first.is_zero());
}

int compare(const Ordinal& x, const Ordinal& y) {
    size_t n = std::min(x.terms.size(), y.terms.size());
    for (size_t i = 0; i < n; ++i) {
        int c = compare(x.terms[i].first, y.terms[i].first);
        if (c != 0) return c;
        if (x.terms[i].second != y.terms[i].second)
            return x.terms[i].second < y.terms[i].second ? -1 : 1;
    }
    if (x.terms.size() == y.terms.size()) return 0;
    return x.terms.size() < y.terms.size() ? -1 : 1;
}

unsigned long long kappa(const Ordinal& x) {
    if (x.terms.empty()) return 0;
    const auto& last = x.terms.back();
    return last.first.is_zero() ? last.second : 0;
}

Ordinal limit_part(const Ordinal& x) {
    Ordinal r = x;
    if (!r.terms.empty() && r.terms.back().first.is_zero()) r.terms.pop_back();
    return r;
}

bool is_limit(const Ordinal& x) { return !x.is_zero() && kappa(x) == 0; }

bool is_successor(const Ordinal& x) { return kappa(x) > 0; }

Ordinal ordinal_add(const Ordinal& x, const Ordinal& y) {
    if (y.is_zero()) return x;
    const Ordinal& e = y.terms.front().first;
    Ordinal r;
    for (const auto& t : x.terms) {
        if (compare(t.first, e) > 0)
            r.terms.push_back(t);
        else
            break;
    }
    // Terms of x with exponent < e are absorbed; an equal exponent merges.
    size_t kept = r.terms.size();
    if (kept < x.terms.size() && compare(x.terms[kept].first, e) == 0) {
        r.terms.push_back({e, x.terms[kept].second + y.terms.front().second});
        r.terms.insert(r.terms.end(), y.terms.begin() + 1, y.terms.end());
    } else {
        r.terms.insert(r.terms.end(), y.terms.begin(), y.terms.end());
    }
    return r;
}

Ordinal successor(const Ordinal& x) { return ordinal_add(x, Ordinal::nat(1)); }

namespace {

struct Parser {
    const std::string& s;
    size_t i = 0;

    explicit Parser(const std::string& str) : s(str) {}

    void skip_ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }

    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }

    unsigned long long number() {
        skip_ws();
        if (i >= s.size() || !std::isdigit((unsigned char)s[i]))
            throw std::invalid_argument("ordinal parse: digit expected at '" + s.substr(i) + "'");
        unsigned long long v = 0;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) {
            v = v * 10 + (unsigned long long)(s[i] - '0');
            ++i;
        }
        return v;
    }

    // term := nat | 'w' ['^' (nat | '(' sum ')')] ['*' nat]
    Ordinal term() {
        skip_ws();
        if (i < s.size() && (s[i] == 'w' || s[i] == 'W')) {
            ++i;
            Ordinal expo = Ordinal::nat(1);
            if (eat('^')) {
                if (eat('(')) {
                    expo = sum();
                    if (!eat(')')) throw std::invalid_argument("ordinal parse: missing ')'");
                } else {
                    expo = Ordinal::nat(number());
                }
            }
            unsigned long long coeff = 1;
            if (eat('*')) coeff = number();
            if (coeff == 0) return Ordinal();
            Ordinal t;
            t.terms.push_back({expo, coeff});
            return t;
        }
        return Ordinal::nat(number());
    }

    Ordinal sum() {
        Ordinal acc = term();
        while (eat('+')) acc = ordinal_add(acc, term());
        return acc;
    }
};

}  // namespace

Ordinal parse_ordinal(const std::string& text) {
    Parser p(text);
    Ordinal o = p.sum();
    p.skip_ws();
    if (p.i != text.size())
        throw std::invalid_argument("ordinal parse: trailing input in '" + text + "'");
    return o;
}

std::string format_ordinal(const Ordinal& x) {
    if (x.is_zero()) return "0";
    std::string out;
    for (size_t i = 0; i < x.terms.size(); ++i) {
        if (i) out += "+";
        const auto& [e, c] = x.terms[i];
        if (e.is_zero()) {
            out += std::to_string(c);
            continue;
        }
        out += "w";
        if (!(e.terms.size() == 1 && e.terms[0].first.is_zero() && e.terms[0].second == 1)) {
            if (e.is_finite())
                out += "^" + std::to_string(kappa(e));
            else
                out += "^(" + format_ordinal(e) + ")";
        }
        if (c != 1) out += "*" + std::to_string(c);
    }
    return out;
}

}  // namespace brs
