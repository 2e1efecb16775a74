#pragma once

#include <map>

#include "brs/dyadic.hpp"

namespace brs {

// A function on [0,1) constant on each cell of D^resolution, stored left to
// right with exact rational values.
struct StepFunction {
    int resolution = 0;
    std::vector<Rat> cells{Rat(0)};

    StepFunction() = default;
    StepFunction(int res, std::vector<Rat> vals);

    static StepFunction constant(const Rat& c, int res = 0);
    static StepFunction indicator(const DyadicInterval& I);

    long long cell_count() const { return 1LL << resolution; }
    const Rat& value_at_cell(long long i) const { return cells[size_t(i)]; }

    Rat mean() const;
    StepFunction refined(int new_resolution) const;

    friend bool operator==(const StepFunction& f, const StepFunction& g);
    friend StepFunction operator+(const StepFunction& f, const StepFunction& g);
    friend StepFunction operator*(const Rat& c, const StepFunction& f);
};

// h_I = chi_{I+} - chi_{I-}.
StepFunction haar(const DyadicInterval& I);

// (T_I f)(t) = f((t - a)/|I|) on I, 0 elsewhere; a |I|-compression.
StepFunction compress_interval(const StepFunction& f, const DyadicInterval& I);

// (Q_I f)(t) = f(a + |I| t); satisfies Q_I T_J = delta_{IJ} id on D^level(I).
StepFunction q_inverse(const StepFunction& f, const DyadicInterval& I);

// Exact conditional expectation onto the level-n dyadic algebra.
StepFunction conditional_expectation(const StepFunction& f, int level);

Distribution distribution_of(const StepFunction& f);
Rat inner_product(const StepFunction& f, const StepFunction& g);

// chi_I = const_coeff * chi_[0,1) + sum_J haar_coeffs[J] * h_J over strict
// predecessors J of I.
struct HaarExpansion {
    Rat const_coeff;
    std::map<DyadicInterval, Rat, LexLess> haar_coeffs;
};
HaarExpansion indicator_in_haar(const DyadicInterval& I);

// Exact sum of mass * |value|^p for integer p >= 1; float norms for real p.
Rat lp_power_sum(const Distribution& d, unsigned p);
double lp_norm(const Distribution& d, double p);

}  // namespace brs
