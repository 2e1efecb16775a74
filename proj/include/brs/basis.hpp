#pragma once

#include "brs/matrix.hpp"
#include "brs/tree.hpp"

namespace brs {

// One vector of the decomposition: the node's compression applied to h_I.
struct BasisIndex {
    int node = 0;
    DyadicInterval interval;
};

// The full enumerated basis of a truncation: per node, the compressed Haar
// vectors over D_{kappa_eff-1}, ordered node-canonically then lexically.
// Predecessor nodes always precede successors and, within one node, [0,1)
// comes first, so the enumeration is a martingale difference sequence.
struct Basis {
    const TruncatedTree* tree = nullptr;
    std::vector<BasisIndex> items;
    std::vector<Dyadic> gram;  // <b_n, b_n> = theta_lambda * |I_n|
    std::map<std::string, int> lookup;

    static Basis of(const TruncatedTree& t);

    int dim() const { return int(items.size()); }
    int find(int node, const DyadicInterval& I) const;
    // First basis position and count for a node's block.
    std::pair<int, int> node_block(int node) const;

    GridItem grid_item(int i, const Rat& coeff = Rat(1)) const;
    std::vector<GridItem> span_items(const SparseVec& coeffs) const;

    // Exact distribution of a span vector (component-factorized).
    Distribution span_distribution(const SparseVec& coeffs, int cap = 24) const;
    // Exact <f, g> for span vectors via the diagonal Gram.
    Rat span_inner(const SparseVec& f, const SparseVec& g) const;
    Rat span_norm2sq(const SparseVec& f) const;
};

struct MdsReport {
    bool pass = true;
    int positions = 0;
    std::vector<std::string> violations;
};

// Exact check that each basis vector has zero conditional expectation given
// the algebra generated by its enumeration predecessors.
MdsReport verify_mds(const Basis& basis, int position_cap = 24);

// Coefficients <b_n, f> / <b_n, b_n> of the biorthogonal projection of an
// arbitrary grid vector onto the span.
RatVec project_grid(const Basis& basis, const std::vector<GridItem>& f, int cap = 24);

// Formal adjoint of an embedding given by its coefficient matrix
// (target dim x source dim): D_src^{-1} M^T D_tgt.
DenseMat adjoint_matrix(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                        const std::vector<Dyadic>& gram_tgt);
// Exact Gram preservation: M^T D_tgt M == diag(gram_src).
bool preserves_gram(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                    const std::vector<Dyadic>& gram_tgt);

// Joint refinement partition of the basis vectors with equal-value cells
// merged; values are in {-1,0,1}.
struct AtomTable {
    int positions = 0;
    std::vector<std::vector<signed char>> patterns;
    std::vector<long long> counts;
};
AtomTable basis_atom_table(const Basis& basis, int position_cap = 22);

}  // namespace brs
