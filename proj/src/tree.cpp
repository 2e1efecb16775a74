#include "brs/tree.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace brs {

bool entry_is_ordinal(const Entry& e) { return std::holds_alternative<Ordinal>(e); }

std::string entry_str(const Entry& e) {
    if (entry_is_ordinal(e)) return format_ordinal(std::get<Ordinal>(e));
    const auto& I = std::get<DyadicInterval>(e);
    return "I" + std::to_string(I.level) + "." + std::to_string(I.index);
}

int entry_compare(const Entry& a, const Entry& b) {
    if (entry_is_ordinal(a) != entry_is_ordinal(b)) return entry_is_ordinal(a) ? -1 : 1;
    if (entry_is_ordinal(a)) return compare(std::get<Ordinal>(a), std::get<Ordinal>(b));
    return lex_order(std::get<DyadicInterval>(a), std::get<DyadicInterval>(b));
}

int TreeNode::height() const {
    int h = 0;
    for (const auto& e : entries)
        if (!entry_is_ordinal(e)) ++h;
    return h;
}

bool TreeNode::all_ordinal() const { return height() == 0; }

bool TreeNode::is_prefix_of(const TreeNode& other) const {
    if (length() > other.length()) return false;
    return std::equal(entries.begin(), entries.end(), other.entries.begin());
}

std::string TreeNode::str() const {
    std::string s = "(";
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i) s += ",";
        s += entry_str(entries[i]);
    }
    return s + ")";
}

std::string TreeNode::key() const {
    std::string s;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i) s += "|";
        s += entry_str(entries[i]);
    }
    return s;
}

void validate_node(const TreeNode& node) {
    const auto& xs = node.entries;
    auto fail = [&](size_t i, const std::string& rule) {
        throw std::invalid_argument("invalid node " + node.str() + ": entry " + std::to_string(i + 1) +
                                    ": " + rule);
    };
    if (xs.empty()) throw std::invalid_argument("invalid node: empty sequence");
    if (!entry_is_ordinal(xs[0])) fail(0, "first entry must be an ordinal");
    if (std::get<Ordinal>(xs[0]).is_zero()) fail(0, "first entry must be at least 1");
    for (size_t i = 0; i < xs.size(); ++i) {
        if (!entry_is_ordinal(xs[i])) continue;
        const Ordinal& x = std::get<Ordinal>(xs[i]);
        if (x.is_zero()) fail(i, "ordinal entries must be at least 1");
        if (is_limit(x)) {
            if (i + 1 >= xs.size()) fail(i, "limit ordinal entry cannot be last");
            if (!entry_is_ordinal(xs[i + 1])) fail(i, "limit ordinal entry must be followed by an ordinal");
            const Ordinal& nxt = std::get<Ordinal>(xs[i + 1]);
            if (!(compare(nxt, x) < 0) || nxt.is_zero())
                fail(i, "limit ordinal entry must be followed by a strictly smaller positive ordinal");
        } else {
            if (i + 1 == xs.size()) continue;
            if (i + 2 >= xs.size()) fail(i, "successor ordinal entry must be last or have two more entries");
            if (entry_is_ordinal(xs[i + 1]))
                fail(i, "successor ordinal entry must be followed by an interval");
            const auto& I = std::get<DyadicInterval>(xs[i + 1]);
            unsigned long long k = kappa(x);
            if (I.level != int(k)) fail(i + 1, "interval must lie at the integer-part level of the previous entry");
            if (!entry_is_ordinal(xs[i + 2])) fail(i + 2, "interval entry must be followed by an ordinal");
            const Ordinal& nxt = std::get<Ordinal>(xs[i + 2]);
            Ordinal lp = limit_part(x);
            if (lp.is_zero()) fail(i, "finite entries are terminal");
            if (!(nxt == lp)) fail(i + 2, "entry plus previous integer part must rebuild the previous ordinal");
        }
    }
    // Intervals never sit at the first position or follow other intervals,
    // which the cases above already enforce transitively.
    if (!entry_is_ordinal(xs.back())) fail(xs.size() - 1, "last entry must be a successor ordinal");
    const Ordinal& last = std::get<Ordinal>(xs.back());
    if (is_limit(last)) fail(xs.size() - 1, "limit ordinal entry cannot be last");
}

Dyadic node_theta(const TreeNode& node) {
    Dyadic t = Dyadic::one();
    for (const auto& e : node.entries)
        if (!entry_is_ordinal(e)) t = t * std::get<DyadicInterval>(e).measure();
    return t;
}

NodeStructure node_structure(const TreeNode& node) {
    const Ordinal& last = std::get<Ordinal>(node.entries.back());
    NodeStructure s;
    s.kappa = int(kappa(last));
    s.b = limit_part(last);
    return s;
}

int node_compare(const TreeNode& a, const TreeNode& b) {
    int ha = a.height(), hb = b.height();
    if (ha != hb) return ha < hb ? -1 : 1;
    size_t n = std::min(a.length(), b.length());
    for (size_t i = 0; i < n; ++i) {
        int c = entry_compare(a.entries[i], b.entries[i]);
        if (c != 0) return c;
    }
    if (a.length() == b.length()) return 0;
    return a.length() < b.length() ? -1 : 1;
}

TreeNode concat(const TreeNode& a, const std::vector<Entry>& suffix) {
    TreeNode r = a;
    r.entries.insert(r.entries.end(), suffix.begin(), suffix.end());
    return r;
}

TreeNode glue(const TreeNode& a, const TreeNode& b) {
    if (a.entries.empty() || b.entries.empty()) throw std::invalid_argument("glue: empty node");
    if (entry_compare(a.entries.back(), b.entries.front()) != 0)
        throw std::invalid_argument("glue: boundary entries differ");
    TreeNode r = a;
    r.entries.insert(r.entries.end(), b.entries.begin() + 1, b.entries.end());
    return r;
}

namespace {

// Arithmetic-progression slice of the global digit positions.
struct Pool {
    long long start = 0, stride = 1;
    int pos(int i) const { return int(start + (long long)i * stride); }
    Pool drop(int k) const { return {start + (long long)k * stride, stride}; }
    Pool round_robin(int i, int branches) const {
        return {start + (long long)i * stride, stride * branches};
    }
    Pool offset(long long off) const { return {start + off * stride, stride}; }
};

struct Draft {
    std::vector<Entry> suffix;
    int kappa = 0;
    int kappa_eff = 0;
    Ordinal b;
    Dyadic theta;
    DigitProgram prog;  // absolute positions; budget patched at the end
};

struct Synth {
    const TruncationSpec& spec;

    std::vector<std::pair<std::vector<Entry>, int>> run(const Ordinal& gamma, int depth_left,
                                                        int keff_override) const {
        std::vector<std::pair<std::vector<Entry>, int>> out;
        int cap = keff_override > 0 ? keff_override : spec.kappa_cap;
        if (gamma.is_finite()) {
            int k = int(kappa(gamma));
            int keff = cap > 0 ? std::min(cap, k) : k;
            out.push_back({{Entry(gamma)}, keff});
            return out;
        }
        if (is_limit(gamma)) {
            auto it = spec.limit_selections.find(format_ordinal(gamma));
            if (it == spec.limit_selections.end())
                throw std::invalid_argument("truncation: no selections for limit ordinal " +
                                            format_ordinal(gamma));
            auto sels = it->second;
            std::sort(sels.begin(), sels.end(),
                      [](const SelectionSpec& x, const SelectionSpec& y) { return x.beta < y.beta; });
            for (const auto& sel : sels) {
                if (sel.beta.is_zero() || !(sel.beta < gamma))
                    throw std::invalid_argument("truncation: selection out of range at " +
                                                format_ordinal(gamma));
                for (auto& [suffix, keff] : run(sel.beta, depth_left, sel.kappa_eff)) {
                    std::vector<Entry> es{Entry(gamma)};
                    es.insert(es.end(), suffix.begin(), suffix.end());
                    out.push_back({std::move(es), keff});
                }
            }
            return out;
        }
        // Infinite successor ordinal.
        int k = int(kappa(gamma));
        Ordinal body = limit_part(gamma);
        bool expand = depth_left > 0 && !body.is_zero();
        int keff = expand ? k : (cap > 0 ? std::min(cap, k) : k);
        out.push_back({{Entry(gamma)}, keff});
        if (expand) {
            auto sub = run(body, depth_left - 1, -1);
            for (const auto& I : level_intervals(k))
                for (const auto& [suffix, skeff] : sub) {
                    std::vector<Entry> es{Entry(gamma), Entry(I)};
                    es.insert(es.end(), suffix.begin(), suffix.end());
                    out.push_back({std::move(es), skeff});
                }
        }
        return out;
    }
};

std::string suffix_key(const std::vector<Entry>& es) {
    std::string s;
    for (size_t i = 0; i < es.size(); ++i) {
        if (i) s += "|";
        s += entry_str(es[i]);
    }
    return s;
}

struct Realizer {
    Alloc alloc;

    // Positions a branch needs under block allocation.
    int required(const std::vector<std::vector<Entry>>& suffixes,
                 const std::map<std::string, int>& keff) const {
        // Generic bound: realize into a scratch pool and measure.
        Realizer scratch{Alloc::Blocks};
        auto drafts = scratch.realize(first_ordinal(suffixes), suffixes, keff, Pool{0, 1});
        int maxp = -1;
        for (const auto& d : drafts)
            for (int p : d.prog.touched_positions()) maxp = std::max(maxp, p);
        return maxp + 1;
    }

    static Ordinal first_ordinal(const std::vector<std::vector<Entry>>& suffixes) {
        return std::get<Ordinal>(suffixes.at(0).at(0));
    }

    std::vector<Draft> realize(const Ordinal& gamma, std::vector<std::vector<Entry>> suffixes,
                               const std::map<std::string, int>& keff, Pool pool) const {
        std::vector<Draft> out;
        auto keff_of = [&](const std::vector<Entry>& sfx, int dflt) {
            auto it = keff.find(suffix_key(sfx));
            return it == keff.end() ? dflt : it->second;
        };

        if (is_limit(gamma)) {
            // Group by the branch ordinal (the entry after gamma).
            std::map<std::string, std::pair<Ordinal, std::vector<std::vector<Entry>>>> branches;
            for (auto& sfx : suffixes) {
                if (sfx.size() < 2 || !entry_is_ordinal(sfx[1]))
                    throw std::invalid_argument("realize: malformed limit suffix");
                Ordinal beta = std::get<Ordinal>(sfx[1]);
                auto& slot = branches[format_ordinal(beta)];
                slot.first = beta;
                slot.second.push_back(std::vector<Entry>(sfx.begin() + 1, sfx.end()));
            }
            std::vector<std::pair<Ordinal, std::vector<std::vector<Entry>>>> ordered;
            for (auto& [k, v] : branches) ordered.push_back(std::move(v));
            std::sort(ordered.begin(), ordered.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            // Child keff requests carry over with the gamma prefix stripped.
            int B = int(ordered.size());
            long long off = 0;
            for (int i = 0; i < B; ++i) {
                std::map<std::string, int> sub_keff;
                for (const auto& sfx : ordered[size_t(i)].second) {
                    std::vector<Entry> full{Entry(gamma)};
                    full.insert(full.end(), sfx.begin(), sfx.end());
                    int kv = keff_of(full, -1);
                    if (kv > 0) sub_keff[suffix_key(sfx)] = kv;
                }
                Pool sub_pool = alloc == Alloc::RoundRobin
                                    ? pool.round_robin(i, B)
                                    : pool.offset(off);
                if (alloc == Alloc::Blocks) off += required(ordered[size_t(i)].second, sub_keff);
                for (auto d : realize(ordered[size_t(i)].first, ordered[size_t(i)].second, sub_keff,
                                      sub_pool)) {
                    d.suffix.insert(d.suffix.begin(), Entry(gamma));
                    out.push_back(std::move(d));
                }
            }
            return out;
        }

        // Successor (or finite) ordinal: a head node plus interval fans.
        int k = int(kappa(gamma));
        Ordinal body = limit_part(gamma);
        bool saw_head = false;
        std::map<std::string, std::vector<Entry>> rest_set;  // dedup of sub-suffixes
        std::map<std::string, int> rest_keff;                // max requested keff
        std::vector<std::pair<DyadicInterval, std::vector<std::vector<Entry>>>> fans;
        std::map<std::string, size_t> fan_index;
        for (auto& sfx : suffixes) {
            if (!(std::get<Ordinal>(sfx[0]) == gamma))
                throw std::invalid_argument("realize: suffix does not start with its ordinal");
            if (sfx.size() == 1) {
                saw_head = true;
                continue;
            }
            const auto& I = std::get<DyadicInterval>(sfx[1]);
            std::vector<Entry> rest(sfx.begin() + 2, sfx.end());
            std::string rk = suffix_key(rest);
            int kv = keff_of(sfx, -1);
            if (kv > 0) {
                auto it = rest_keff.find(rk);
                rest_keff[rk] = it == rest_keff.end() ? kv : std::max(it->second, kv);
            } else {
                rest_keff[rk] = node_structure(TreeNode(rest)).kappa;
            }
            rest_set.emplace(rk, rest);
            auto fit = fan_index.find(entry_str(Entry(I)));
            if (fit == fan_index.end()) {
                fan_index[entry_str(Entry(I))] = fans.size();
                fans.push_back({I, {}});
            }
            fans[fan_index[entry_str(Entry(I))]].second.push_back(std::move(rest));
        }
        bool has_children = !rest_set.empty();
        if (!saw_head && has_children)
            throw std::invalid_argument("realize: node set not downward closed at " +
                                        format_ordinal(gamma));

        Draft head;
        head.suffix = {Entry(gamma)};
        head.kappa = k;
        head.b = body;
        head.theta = Dyadic::one();
        head.kappa_eff = has_children ? k : std::min(k, std::max(1, keff_of(head.suffix, k)));
        for (int j = 0; j < (has_children ? k : head.kappa_eff); ++j)
            head.prog.reads.push_back(pool.pos(j));
        head.prog.reads.resize(size_t(head.kappa_eff));
        if (saw_head) out.push_back(head);

        if (!has_children) return out;
        std::vector<std::vector<Entry>> union_rests;
        for (auto& [rk, rest] : rest_set) union_rests.push_back(rest);
        auto sub_drafts = realize(std::get<Ordinal>(union_rests[0][0]), union_rests, rest_keff,
                                  pool.drop(k));
        std::map<std::string, const Draft*> by_key;
        for (const auto& d : sub_drafts) by_key[suffix_key(d.suffix)] = &d;
        for (const auto& [I, rests] : fans) {
            std::vector<std::pair<int, int>> head_cons;
            for (int j = 0; j < k; ++j)
                head_cons.push_back({pool.pos(j), int(((I.index - 1) >> (k - 1 - j)) & 1)});
            for (const auto& rest : rests) {
                const Draft* sd = by_key.at(suffix_key(rest));
                Draft d = *sd;
                d.suffix.clear();
                d.suffix.push_back(Entry(gamma));
                d.suffix.push_back(Entry(I));
                d.suffix.insert(d.suffix.end(), sd->suffix.begin(), sd->suffix.end());
                d.prog.constraints.insert(d.prog.constraints.end(), head_cons.begin(), head_cons.end());
                std::sort(d.prog.constraints.begin(), d.prog.constraints.end());
                d.theta = I.measure() * sd->theta;
                // The node's own keff may be below the shared realization's.
                std::vector<Entry> full{Entry(gamma), Entry(I)};
                full.insert(full.end(), rest.begin(), rest.end());
                int kv = keff_of(full, d.kappa_eff);
                if (kv < d.kappa_eff) {
                    d.kappa_eff = kv;
                    d.prog.reads.resize(size_t(kv));
                }
                out.push_back(std::move(d));
            }
        }
        return out;
    }
};

}  // namespace

TruncatedTree TruncatedTree::from_nodes(const Ordinal& alpha, const std::vector<TreeNode>& in_nodes,
                                        const std::map<std::string, int>& kappa_eff, int budget,
                                        Alloc alloc) {
    if (budget < 1 || budget > 62) throw std::invalid_argument("truncation: budget must be in 1..62");
    std::vector<std::vector<Entry>> suffixes;
    std::set<std::string> seen;
    for (const auto& n : in_nodes) {
        validate_node(n);
        if (!(std::get<Ordinal>(n.entries[0]) == alpha))
            throw std::invalid_argument("truncation: node does not start with alpha: " + n.str());
        if (seen.insert(n.key()).second) suffixes.push_back(n.entries);
    }
    if (suffixes.empty()) throw std::invalid_argument("truncation: empty node set");

    Realizer rz{alloc};
    std::vector<Draft> drafts;
    if (is_limit(alpha)) {
        // Limit trees have no head node; route straight into the limit case.
        drafts = rz.realize(alpha, suffixes, kappa_eff, Pool{0, 1});
    } else {
        drafts = rz.realize(alpha, suffixes, kappa_eff, Pool{0, 1});
    }

    TruncatedTree t;
    t.alpha = alpha;
    t.budget = budget;
    t.alloc = alloc;
    for (auto& d : drafts) {
        RealizedNode rn;
        rn.node = TreeNode(d.suffix);
        rn.kappa = node_structure(rn.node).kappa;
        rn.kappa_eff = d.kappa_eff;
        rn.b = node_structure(rn.node).b;
        rn.theta = node_theta(rn.node);
        rn.prog = d.prog;
        t.nodes.push_back(std::move(rn));
    }
    std::sort(t.nodes.begin(), t.nodes.end(),
              [](const RealizedNode& a, const RealizedNode& b) { return node_compare(a.node, b.node) < 0; });
    int maxp = -1;
    for (auto& rn : t.nodes)
        for (int p : rn.prog.touched_positions()) maxp = std::max(maxp, p);
    t.positions_used = maxp + 1;
    if (t.positions_used > budget)
        throw std::runtime_error("truncation: digit budget exhausted (required " +
                                 std::to_string(t.positions_used) + ", budget " +
                                 std::to_string(budget) + ")");
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        auto& rn = t.nodes[i];
        rn.prog.budget = budget;
        rn.prog.validate();
        if (!(rn.prog.theta() == rn.theta))
            throw std::logic_error("truncation: realized theta mismatch at " + rn.node.str());
        t.index[rn.node.key()] = int(i);
    }
    // Parent links + downward closure.
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        auto& rn = t.nodes[i];
        rn.parent = -1;
        for (size_t len = rn.node.length() - 1; len >= 1; --len) {
            TreeNode prefix(std::vector<Entry>(rn.node.entries.begin(),
                                               rn.node.entries.begin() + (long)len));
            bool valid = true;
            try {
                validate_node(prefix);
            } catch (const std::invalid_argument&) {
                valid = false;
            }
            if (!valid) continue;
            auto it = t.index.find(prefix.key());
            if (it == t.index.end())
                throw std::invalid_argument("truncation: node set not downward closed; missing " +
                                            prefix.str());
            rn.parent = it->second;
            break;
        }
        if ((rn.parent == -1) != rn.node.all_ordinal())
            throw std::logic_error("truncation: root characterization violated at " + rn.node.str());
    }
    return t;
}

TruncatedTree TruncatedTree::build(const TruncationSpec& spec) {
    Synth synth{spec};
    auto pairs = synth.run(spec.alpha, spec.max_depth, -1);
    std::vector<TreeNode> ns;
    std::map<std::string, int> keff;
    for (auto& [entries, k] : pairs) {
        TreeNode n(entries);
        keff[n.key()] = k;
        ns.push_back(std::move(n));
    }
    // Roles propagate from the selection that opened the branch.
    TruncatedTree t = from_nodes(spec.alpha, ns, keff, spec.budget, spec.alloc);
    if (is_limit(spec.alpha)) {
        auto it = spec.limit_selections.find(format_ordinal(spec.alpha));
        if (it != spec.limit_selections.end()) {
            for (auto& rn : t.nodes) {
                const Ordinal& branch = std::get<Ordinal>(rn.node.entries[1]);
                for (const auto& sel : it->second)
                    if (sel.beta == branch) rn.role = sel.role;
            }
        }
    }
    return t;
}

int TruncatedTree::find(const TreeNode& node) const {
    auto it = index.find(node.key());
    return it == index.end() ? -1 : it->second;
}

std::vector<int> TruncatedTree::roots() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].parent < 0) out.push_back(int(i));
    return out;
}

std::vector<int> TruncatedTree::immediate_successors(int node, const DyadicInterval& I) const {
    if (node < 0 || node >= node_count()) throw std::out_of_range("immediate_successors: bad node");
    const auto& base = nodes[size_t(node)];
    if (I.level != base.kappa)
        throw std::invalid_argument("immediate_successors: interval level must equal kappa");
    std::vector<int> out;
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].parent != node) continue;
        const auto& e = nodes[i].node.entries[base.node.length()];
        if (!entry_is_ordinal(e) && std::get<DyadicInterval>(e) == I) out.push_back(int(i));
    }
    return out;
}

bool TruncatedTree::comparable(int a, int b) const {
    return nodes[size_t(a)].node.is_prefix_of(nodes[size_t(b)].node) ||
           nodes[size_t(b)].node.is_prefix_of(nodes[size_t(a)].node);
}

bool TruncatedTree::disjointly_supported(int a, int b) const {
    if (comparable(a, b)) throw std::invalid_argument("disjointly_supported: comparable nodes");
    const auto& xa = nodes[size_t(a)].node.entries;
    const auto& xb = nodes[size_t(b)].node.entries;
    size_t n = std::min(xa.size(), xb.size());
    for (size_t i = 0; i < n; ++i) {
        if (entry_compare(xa[i], xb[i]) != 0)
            return !entry_is_ordinal(xa[i]) && !entry_is_ordinal(xb[i]);
    }
    throw std::logic_error("disjointly_supported: prefix nodes slipped through");
}

}  // namespace brs
