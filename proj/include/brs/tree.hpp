#pragma once

#include <map>
#include <optional>
#include <variant>

#include "brs/digit_program.hpp"
#include "brs/ordinal.hpp"

namespace brs {

using Entry = std::variant<Ordinal, DyadicInterval>;

bool entry_is_ordinal(const Entry& e);
std::string entry_str(const Entry& e);
int entry_compare(const Entry& a, const Entry& b);

// A member of the ambient index tree: a finite alternating sequence of
// ordinals and dyadic intervals subject to the structural rules below.
struct TreeNode {
    std::vector<Entry> entries;

    TreeNode() = default;
    explicit TreeNode(std::vector<Entry> es) : entries(std::move(es)) {}

    size_t length() const { return entries.size(); }
    // Number of interval entries; equals the node's height above its root.
    int height() const;
    bool all_ordinal() const;
    bool is_prefix_of(const TreeNode& other) const;

    std::string str() const;
    std::string key() const;

    friend bool operator==(const TreeNode& a, const TreeNode& b) { return a.entries == b.entries; }
};

// Throws std::invalid_argument naming the violated structural rule and the
// entry position when the sequence is not a valid node.
void validate_node(const TreeNode& node);

// Product of the interval entries' measures (empty product = 1).
Dyadic node_theta(const TreeNode& node);

struct NodeStructure {
    int kappa = 0;  // integer part of the last entry
    Ordinal b;      // limit part of the last entry
};
NodeStructure node_structure(const TreeNode& node);

// Canonical enumeration order: height first, then entrywise comparison.
// Compatible with the initial-segment partial order.
int node_compare(const TreeNode& a, const TreeNode& b);

// lambda^frown mu and the gluing lambda (+) mu (last entry of lambda must
// equal the first entry of mu; the duplicate is dropped).
TreeNode concat(const TreeNode& a, const std::vector<Entry>& suffix);
TreeNode glue(const TreeNode& a, const TreeNode& b);

struct SelectionSpec {
    Ordinal beta;
    int kappa_eff = -1;       // cap on the branch root's component dimension
    std::string role = "";    // free-form tag ("source"/"target" for reductions)
};

enum class Alloc { RoundRobin, Blocks };

struct TruncationSpec {
    Ordinal alpha;
    // Keyed by the formatted limit ordinal; every limit ordinal reachable in
    // the truncation must have an entry.
    std::map<std::string, std::vector<SelectionSpec>> limit_selections;
    int max_depth = 0;   // interval expansions allowed below the roots
    int budget = 24;     // grid digit budget
    int kappa_cap = -1;  // optional cap on terminal-node dimensions
    Alloc alloc = Alloc::RoundRobin;
};

struct RealizedNode {
    TreeNode node;
    int kappa = 0;      // structural integer part
    int kappa_eff = 0;  // component dimension used for the decomposition
    Ordinal b;
    Dyadic theta;
    DigitProgram prog;
    int parent = -1;  // index of the longest proper prefix, -1 for roots
    std::string role;
};

// A finite, downward-closed, realized fragment of the index tree. Nodes are
// stored in canonical order; programs share one digit budget and realize
// pairwise-exact disjointness/independence at grid level.
struct TruncatedTree {
    Ordinal alpha;
    int budget = 0;
    int positions_used = 0;
    Alloc alloc = Alloc::RoundRobin;
    std::vector<RealizedNode> nodes;
    std::map<std::string, int> index;

    static TruncatedTree build(const TruncationSpec& spec);
    // Realize an explicit node set (validated, downward-closure checked).
    // kappa_eff overrides are keyed by node key and may only shrink terminal
    // nodes.
    static TruncatedTree from_nodes(const Ordinal& alpha, const std::vector<TreeNode>& nodes,
                                    const std::map<std::string, int>& kappa_eff, int budget,
                                    Alloc alloc);

    int find(const TreeNode& node) const;
    int node_count() const { return int(nodes.size()); }
    std::vector<int> roots() const;
    std::vector<int> immediate_successors(int node, const DyadicInterval& I) const;
    bool comparable(int a, int b) const;
    // First differing entries are both intervals. Throws on comparable input.
    bool disjointly_supported(int a, int b) const;
};

}  // namespace brs
