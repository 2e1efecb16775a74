#pragma once

#include <map>
#include <vector>

#include "brs/rational.hpp"

namespace brs {

// Left-closed right-open dyadic interval [(index-1)/2^level, index/2^level),
// 1 <= index <= 2^level.
struct DyadicInterval {
    int level = 0;
    long long index = 1;

    DyadicInterval() = default;
    DyadicInterval(int lvl, long long idx);

    Dyadic measure() const { return Dyadic::pow2(level); }
    Rat left() const { return Rat(index - 1) / Dyadic::pow2(-level).to_rat(); }

    DyadicInterval left_half() const { return DyadicInterval(level + 1, 2 * index - 1); }
    DyadicInterval right_half() const { return DyadicInterval(level + 1, 2 * index); }

    // Immediate predecessor pi(I). Throws on the root interval.
    DyadicInterval predecessor() const;
    // +1 if this is the left half of its predecessor, -1 otherwise.
    int sign() const;

    bool contains(const DyadicInterval& other) const;
    // Restriction of this interval viewed inside `outer` rescaled to [0,1).
    // Requires outer.contains(*this).
    DyadicInterval relative_to(const DyadicInterval& outer) const;

    friend bool operator==(const DyadicInterval& a, const DyadicInterval& b) {
        return a.level == b.level && a.index == b.index;
    }

    std::string str() const;
};

// Level-major lexicographic enumeration order of the dyadic tree.
int lex_order(const DyadicInterval& a, const DyadicInterval& b);

struct LexLess {
    bool operator()(const DyadicInterval& a, const DyadicInterval& b) const {
        return lex_order(a, b) < 0;
    }
};

// All of D^n (fixed level) and D_n (levels 0..n), in lexicographic order.
std::vector<DyadicInterval> level_intervals(int n);
std::vector<DyadicInterval> intervals_up_to(int n);

// Finitely supported probability distribution on the rationals with exact
// dyadic masses. Atoms with zero mass are never stored.
struct Distribution {
    std::map<Rat, Dyadic> atoms;

    static Distribution point(const Rat& value);

    void add_mass(const Rat& value, const Dyadic& mass);
    Dyadic total_mass() const;
    bool is_probability() const { return total_mass().is_one(); }

    friend bool operator==(const Distribution& a, const Distribution& b) {
        return a.atoms == b.atoms;
    }
};

// theta * d + (1 - theta) * delta_0, 0 < theta <= 1.
Distribution compress_distribution(const Distribution& d, const Dyadic& theta);

// Distribution of X + Y for independent X ~ a, Y ~ b.
Distribution convolve_independent(const Distribution& a, const Distribution& b);

}  // namespace brs
