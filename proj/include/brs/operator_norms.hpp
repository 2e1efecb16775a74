#pragma once

#include "brs/basis.hpp"

namespace brs {

// Operators between basis spans are identified with their coefficient
// matrices: column n holds the expansion of the image of b_n. Norms are the
// induced L_p operator norms on the spans.

// Rayleigh-quotient lower bound for the L_2 norm (float power iteration on
// the Gram-weighted normal operator).
double l2_power_lower(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                      const std::vector<Dyadic>& gram_tgt, int iters = 400);

// Certified upper bound for the L_2 norm: bisection on t with the exact
// positive-semidefiniteness test of t^2 D_src - M^T D_tgt M.
double l2_certified_upper(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                          const std::vector<Dyadic>& gram_tgt, double rel_tol = 1e-10);

// Exact kernel bound ||K||_1^{1/p} ||K||_inf^{1/q} for the biorthogonal
// kernel extension of a square matrix on one basis span; sound for the
// restriction to the span.
double kernel_interpolation_upper(const Basis& basis, const DenseMat& m, double p,
                                  int position_cap = 22);

// Iterated duality ascent on the atom partition; any iterate certifies a
// lower bound of the true L_p norm.
double duality_ascent_lower(const Basis& basis, const DenseMat& m, double p, int position_cap = 22,
                            int iters = 60);

struct NormBounds {
    double lower = 0;
    double upper = 0;
};

// Two-sided L_p operator-norm bracket for a square matrix on a basis span.
NormBounds operator_norm_bounds(const Basis& basis, const DenseMat& m, double p,
                                int position_cap = 22);

}  // namespace brs
