#pragma once

#include <memory>
#include <optional>

#include "brs/basis.hpp"
#include "brs/rng.hpp"

namespace brs {

// Signed-block embedding of L_p^{n,0} into L_p^{k,0}: the image of h_I is
// sum of theta_K h_K over a block set B_I at one level per source level,
// with level-0 blocks tiling [0,1) and B_I tiling [J h_pi(I) = eps(I)].
// These conditions make the images an exact distributional copy of the Haar
// system, hence J a distributional embedding.
struct BlockEmbedding {
    int source_kappa = 0;
    int target_kappa = 0;
    std::map<DyadicInterval, std::vector<std::pair<DyadicInterval, int>>, LexLess> blocks;

    static BlockEmbedding identity(int n);
    // Random valid embedding with prescribed block levels (strictly
    // increasing, levels[i] >= i).
    static BlockEmbedding random(SplitRng rng, int n, int k, const std::vector<int>& levels);

    // Throws std::invalid_argument naming the first violated condition.
    void validate() const;

    // [image of h_I = s] as disjoint intervals at level(blocks of I)+1.
    std::vector<DyadicInterval> sign_set(const DyadicInterval& I, int s) const;
    // D^kappa_I: intervals P at level `kappa` with P inside [J h_pi(I) = eps(I)].
    std::vector<DyadicInterval> admissible(const DyadicInterval& I, int kappa) const;

    StepFunction apply(const StepFunction& f) const;
    int block_level(int source_level) const;
};

BlockEmbedding compose_embeddings(const BlockEmbedding& outer, const BlockEmbedding& inner);

struct SchemeImage {
    int target_node = -1;
    BlockEmbedding embed;
};

// Distributional embedding scheme between two realized truncations: one
// finite antichain of target nodes plus block embeddings per source node.
struct Scheme {
    std::shared_ptr<const TruncatedTree> source;
    std::shared_ptr<const TruncatedTree> target;
    std::vector<std::vector<SchemeImage>> families;  // by source node index

    static Scheme identity(std::shared_ptr<const TruncatedTree> tree);
};

struct SchemeReport {
    bool pass = true;
    std::vector<std::string> failures;  // axiom label + witness per entry

    void fail(const std::string& what) {
        pass = false;
        failures.push_back(what);
    }
};

// Exact verification of the scheme axioms: (a-i) pairwise disjoint supports
// inside each family, (a-ii) exact measure balance, (b) incomparability
// transport, (c) interval-compatible nesting through the embeddings.
SchemeReport verify_scheme(const Scheme& s);

struct GammaCheck {
    bool applicable = false;
    Dyadic lhs, rhs;
    bool equal = false;
    std::string detail;
};

// Exact measure identities for the antichain pieces above mu0 (optionally
// restricted through an interval J, with case selection per the hypotheses:
// no J = case a; J with mu0 outside the family of the minimal node = case b;
// I and J with mu0 inside it = case c).
GammaCheck gamma_sums(const Scheme& s, int lambda, const TreeNode& mu0,
                      std::optional<DyadicInterval> I, std::optional<DyadicInterval> J);

// Coefficient matrix of T_Psi from source basis to target basis (all-signs
// columns).
SparseMat assemble(const Scheme& s, const Basis& src, const Basis& tgt);

struct DistributionalReport {
    bool pass = true;
    int samples = 0;
    std::vector<std::string> failures;
};

// Exact distribution preservation on random rational span vectors plus exact
// Gram isometry of all basis pairs.
DistributionalReport verify_distributional(const Scheme& s, const Basis& src, const Basis& tgt,
                                           int samples, SplitRng rng, int cap = 24,
                                           int threads = 1);

enum class ExtractForm { ThroughIntervals, RootThroughInterval, Glued };

struct ExtractAnchor {
    ExtractForm form = ExtractForm::ThroughIntervals;
    int lambda0 = -1;                       // source node index
    TreeNode mu0;                           // target node (by entries)
    std::optional<DyadicInterval> I;        // ThroughIntervals only
    std::optional<DyadicInterval> J;        // ThroughIntervals / RootThroughInterval
};

// Sub-scheme extraction; the returned scheme owns freshly realized source
// and target truncations for the relocated trees.
Scheme extract_subscheme(const Scheme& s, const ExtractAnchor& anchor);

}  // namespace brs
