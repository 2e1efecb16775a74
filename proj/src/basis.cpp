#include "brs/basis.hpp"

#include <map>
#include <stdexcept>

namespace brs {

namespace {
std::string item_key(int node, const DyadicInterval& I) {
    return std::to_string(node) + "#" + std::to_string(I.level) + "." + std::to_string(I.index);
}
}  // namespace

Basis Basis::of(const TruncatedTree& t) {
    Basis b;
    b.tree = &t;
    for (int n = 0; n < t.node_count(); ++n) {
        const auto& rn = t.nodes[size_t(n)];
        for (const auto& I : intervals_up_to(rn.kappa_eff - 1)) {
            b.lookup[item_key(n, I)] = b.dim();
            b.items.push_back({n, I});
            b.gram.push_back(rn.theta * I.measure());
        }
    }
    return b;
}

int Basis::find(int node, const DyadicInterval& I) const {
    auto it = lookup.find(item_key(node, I));
    return it == lookup.end() ? -1 : it->second;
}

std::pair<int, int> Basis::node_block(int node) const {
    int first = find(node, DyadicInterval(0, 1));
    if (first < 0) throw std::out_of_range("node_block: node has no basis vectors");
    int count = (1 << tree->nodes[size_t(node)].kappa_eff) - 1;
    return {first, count};
}

GridItem Basis::grid_item(int i, const Rat& coeff) const {
    const auto& idx = items.at(size_t(i));
    return GridItem{tree->nodes[size_t(idx.node)].prog, haar(idx.interval), coeff};
}

std::vector<GridItem> Basis::span_items(const SparseVec& coeffs) const {
    std::vector<GridItem> out;
    for (const auto& [i, v] : coeffs.nz) out.push_back(grid_item(i, v));
    return out;
}

Distribution Basis::span_distribution(const SparseVec& coeffs, int cap) const {
    return grid_distribution(span_items(coeffs), cap);
}

Rat Basis::span_inner(const SparseVec& f, const SparseVec& g) const { return f.dot_weighted(g, gram); }

Rat Basis::span_norm2sq(const SparseVec& f) const { return span_inner(f, f); }

MdsReport verify_mds(const Basis& basis, int position_cap) {
    MdsReport report;
    std::vector<GridItem> items;
    for (int i = 0; i < basis.dim(); ++i) items.push_back(basis.grid_item(i));

    // Classes of the predecessor algebra are the joint value patterns; the
    // conditional expectation vanishes iff each class sums the next vector
    // to zero.
    std::vector<std::map<std::string, long long>> sums(size_t(basis.dim()));
    enumerate_joint(
        items, position_cap,
        [&](const std::vector<Rat>& values) {
            std::string key;
            key.reserve(values.size());
            for (size_t n = 0; n < values.size(); ++n) {
                int v = sgn(values[n]) == 0 ? 0 : (sgn(values[n]) > 0 ? 1 : -1);
                sums[n][key] += v;
                key.push_back(char('1' + v));
            }
        },
        &report.positions);

    for (size_t n = 0; n < sums.size(); ++n)
        for (const auto& [key, s] : sums[n])
            if (s != 0) {
                report.pass = false;
                const auto& idx = basis.items[n];
                report.violations.push_back(
                    "vector " + std::to_string(n) + " (node " +
                    basis.tree->nodes[size_t(idx.node)].node.str() + ", interval " +
                    idx.interval.str() + "): conditional expectation " + std::to_string(s) +
                    " cells on class '" + key + "'");
            }
    return report;
}

RatVec project_grid(const Basis& basis, const std::vector<GridItem>& f, int cap) {
    RatVec coeffs(size_t(basis.dim()));
    for (int i = 0; i < basis.dim(); ++i) {
        std::vector<GridItem> bi{basis.grid_item(i)};
        Rat ip = grid_inner_product(bi, f, cap);
        coeffs[size_t(i)] = ip / basis.gram[size_t(i)].to_rat();
    }
    return coeffs;
}

DenseMat adjoint_matrix(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                        const std::vector<Dyadic>& gram_tgt) {
    DenseMat a(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            const Rat& v = m.at(i, j);
            if (sgn(v) == 0) continue;
            a.at(j, i) = v * gram_tgt[size_t(i)].to_rat() / gram_src[size_t(j)].to_rat();
        }
    return a;
}

bool preserves_gram(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                    const std::vector<Dyadic>& gram_tgt) {
    for (int j = 0; j < m.cols; ++j)
        for (int k = j; k < m.cols; ++k) {
            Rat s = 0;
            for (int i = 0; i < m.rows; ++i) {
                const Rat& x = m.at(i, j);
                if (sgn(x) == 0) continue;
                s += x * m.at(i, k) * gram_tgt[size_t(i)].to_rat();
            }
            Rat want = j == k ? gram_src[size_t(j)].to_rat() : Rat(0);
            if (s != want) return false;
        }
    return true;
}

AtomTable basis_atom_table(const Basis& basis, int position_cap) {
    std::vector<GridItem> items;
    for (int i = 0; i < basis.dim(); ++i) items.push_back(basis.grid_item(i));
    AtomTable table;
    std::map<std::vector<signed char>, long long> merged;
    enumerate_joint(
        items, position_cap,
        [&](const std::vector<Rat>& values) {
            std::vector<signed char> pat(values.size());
            for (size_t n = 0; n < values.size(); ++n)
                pat[n] = (signed char)(sgn(values[n]) == 0 ? 0 : (sgn(values[n]) > 0 ? 1 : -1));
            merged[pat] += 1;
        },
        &table.positions);
    for (auto& [pat, cnt] : merged) {
        table.patterns.push_back(pat);
        table.counts.push_back(cnt);
    }
    return table;
}

}  // namespace brs
