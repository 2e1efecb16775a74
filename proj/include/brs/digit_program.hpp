#pragma once

#include <functional>

#include "brs/step_function.hpp"

namespace brs {

// Exact realization of a theta-compression on the binary grid {0,1}^budget.
// A cell is a bit assignment to digit positions; the program maps an input
// step function f (resolution <= #reads) to the grid function equal to
// f(bits at the read positions) on cells satisfying every constraint and 0
// elsewhere. theta = 2^{-#constraints}.
struct DigitProgram {
    int budget = 0;
    std::vector<std::pair<int, int>> constraints;  // (position, bit), sorted by position
    std::vector<int> reads;                        // ordered, disjoint from constraints

    DigitProgram() = default;
    DigitProgram(int budget_, std::vector<std::pair<int, int>> cons, std::vector<int> rds);

    static DigitProgram identity(int m, int budget = -1);
    // Standalone program of T_I: constraints encode I's digits at positions
    // 0..level-1, reads follow at level..level+inner_reads-1.
    static DigitProgram interval(const DyadicInterval& I, int inner_reads);

    Dyadic theta() const { return Dyadic::pow2(int(constraints.size())); }
    void validate() const;

    std::vector<int> touched_positions() const;
    // Constraint positions plus the first `resolution` read positions; the
    // positions an application to a resolution-`resolution` input inspects.
    std::vector<int> used_positions(int resolution) const;
};

// Program of outer . inner: inner's positions are routed through outer's
// read map. Requires #reads(outer) >= budget(inner).
DigitProgram compose(const DigitProgram& outer, const DigitProgram& inner);

// True when the two programs' constraints contradict (disjoint supports).
bool constraints_contradict(const DigitProgram& a, const DigitProgram& b);

// Materialize the program applied to f as a step function on the full grid.
// Intended for small budgets and brute-force oracles.
StepFunction apply_program(const DigitProgram& p, const StepFunction& f);

// One summand of a cylinder vector: coeff * (p applied to f).
struct GridItem {
    DigitProgram prog;
    StepFunction f;
    Rat coeff = 1;
};

// Exact distribution of sum(coeff_i * apply(prog_i, f_i)). Items are split
// into independence components (disjoint touched-position sets); each
// component is enumerated over its own cube only and the component laws are
// convolved. Throws if a component touches more than `component_cap`
// positions.
Distribution grid_distribution(const std::vector<GridItem>& items, int component_cap = 24);

// Exact <A, B> = integral of A*B over the grid, with the same component
// factorization (cross-component terms reduce to products of means).
Rat grid_inner_product(const std::vector<GridItem>& a, const std::vector<GridItem>& b,
                       int component_cap = 24);

// Enumerate the joint refinement partition of all items: the callback
// receives each cell's per-item values and the cell mass exponent
// (mass = 2^{-positions}). No component splitting; meant for small inputs.
void enumerate_joint(const std::vector<GridItem>& items, int position_cap,
                     const std::function<void(const std::vector<Rat>&)>& per_cell,
                     int* positions_out = nullptr);

}  // namespace brs
