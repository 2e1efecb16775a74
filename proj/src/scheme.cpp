#include "brs/scheme.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <atomic>
#include <thread>

namespace brs {

namespace {

std::string iv(const DyadicInterval& I) { return I.str(); }

// Disjoint intervals at a common level, kept sorted by index.
struct IntervalSet {
    int level = 0;
    std::set<long long> idx;

    bool contains(const DyadicInterval& P) const {
        if (P.level >= level) {
            DyadicInterval up(level, ((P.index - 1) >> (P.level - level)) + 1);
            return idx.count(up.index) > 0;
        }
        long long lo = ((P.index - 1) << (level - P.level)) + 1;
        long long n = 1LL << (level - P.level);
        for (long long i = 0; i < n; ++i)
            if (!idx.count(lo + i)) return false;
        return true;
    }
};

}  // namespace

BlockEmbedding BlockEmbedding::identity(int n) {
    BlockEmbedding j;
    j.source_kappa = n;
    j.target_kappa = n;
    for (const auto& I : intervals_up_to(n - 1)) j.blocks[I] = {{I, 1}};
    return j;
}

int BlockEmbedding::block_level(int source_level) const {
    auto it = blocks.find(DyadicInterval(source_level, 1));
    if (it == blocks.end() || it->second.empty())
        throw std::invalid_argument("block embedding: missing level " + std::to_string(source_level));
    return it->second.front().first.level;
}

void BlockEmbedding::validate() const {
    if (source_kappa < 1 || target_kappa < source_kappa)
        throw std::invalid_argument("block embedding: bad kappa pair");
    int prev_level = -1;
    for (int i = 0; i < source_kappa; ++i) {
        int mi = -1;
        for (const auto& I : level_intervals(i)) {
            auto it = blocks.find(I);
            if (it == blocks.end() || it->second.empty())
                throw std::invalid_argument("block embedding: no blocks for " + iv(I));
            std::set<long long> seen;
            for (const auto& [K, s] : it->second) {
                if (s != 1 && s != -1) throw std::invalid_argument("block embedding: sign must be +-1");
                if (mi < 0) mi = K.level;
                if (K.level != (it->second.front().first.level))
                    throw std::invalid_argument("block embedding: mixed levels inside " + iv(I));
                if (K.level != mi)
                    throw std::invalid_argument("block embedding: level differs across " +
                                                std::to_string(i));
                if (!seen.insert(K.index).second)
                    throw std::invalid_argument("block embedding: repeated block in " + iv(I));
            }
        }
        if (mi <= prev_level)
            throw std::invalid_argument("block embedding: block levels must increase with depth");
        if (mi > target_kappa - 1)
            throw std::invalid_argument("block embedding: block level exceeds target kappa");
        prev_level = mi;
        // Tiling: level 0 covers [0,1); deeper levels cover the parent sign set.
        for (const auto& I : level_intervals(i)) {
            const auto& bl = blocks.at(I);
            if (i == 0) {
                if (int(bl.size()) != (1 << mi))
                    throw std::invalid_argument("block embedding: level-0 blocks must tile [0,1)");
                continue;
            }
            auto want = sign_set(I.predecessor(), I.sign());
            IntervalSet ws;
            ws.level = want.empty() ? mi : want.front().level;
            for (const auto& w : want) ws.idx.insert(w.index);
            Dyadic covered = Dyadic::zero();
            for (const auto& [K, s] : bl) {
                if (!ws.contains(K))
                    throw std::invalid_argument("block embedding: block " + iv(K) +
                                                " escapes the parent sign set of " + iv(I));
                covered = covered + K.measure();
            }
            if (!(covered == I.measure()))
                throw std::invalid_argument("block embedding: blocks of " + iv(I) +
                                            " do not tile the parent sign set");
        }
    }
}

std::vector<DyadicInterval> BlockEmbedding::sign_set(const DyadicInterval& I, int s) const {
    auto it = blocks.find(I);
    if (it == blocks.end()) throw std::invalid_argument("sign_set: no blocks for " + iv(I));
    std::vector<DyadicInterval> out;
    for (const auto& [K, sk] : it->second) out.push_back(sk == s ? K.left_half() : K.right_half());
    std::sort(out.begin(), out.end(),
              [](const DyadicInterval& a, const DyadicInterval& b) { return lex_order(a, b) < 0; });
    return out;
}

std::vector<DyadicInterval> BlockEmbedding::admissible(const DyadicInterval& I, int kappa) const {
    auto set = sign_set(I.predecessor(), I.sign());
    IntervalSet ws;
    ws.level = set.empty() ? 0 : set.front().level;
    for (const auto& w : set) ws.idx.insert(w.index);
    std::vector<DyadicInterval> out;
    for (const auto& P : level_intervals(kappa))
        if (ws.contains(P)) out.push_back(P);
    return out;
}

StepFunction BlockEmbedding::apply(const StepFunction& f) const {
    if (f.resolution > source_kappa) throw std::invalid_argument("block embedding: resolution too fine");
    if (sgn(f.mean()) != 0) throw std::invalid_argument("block embedding: input must be mean zero");
    // Expand in the Haar system, then map coefficients through the blocks.
    StepFunction out = StepFunction::constant(Rat(0), target_kappa);
    StepFunction rest = f.refined(source_kappa);
    for (int lvl = 0; lvl < f.resolution; ++lvl)
        for (const auto& I : level_intervals(lvl)) {
            StepFunction h = haar(I);
            Rat a = inner_product(rest, h) / I.measure().to_rat();
            if (sgn(a) == 0) continue;
            for (const auto& [K, s] : blocks.at(I)) out = out + (a * Rat(s)) * haar(K);
        }
    return out;
}

BlockEmbedding compose_embeddings(const BlockEmbedding& outer, const BlockEmbedding& inner) {
    if (outer.source_kappa < inner.target_kappa)
        throw std::invalid_argument("compose: outer source kappa below inner target kappa");
    BlockEmbedding r;
    r.source_kappa = inner.source_kappa;
    r.target_kappa = outer.target_kappa;
    for (const auto& [I, bl] : inner.blocks) {
        std::vector<std::pair<DyadicInterval, int>> acc;
        for (const auto& [K, s] : bl)
            for (const auto& [K2, s2] : outer.blocks.at(K)) acc.push_back({K2, s * s2});
        r.blocks[I] = std::move(acc);
    }
    return r;
}

BlockEmbedding BlockEmbedding::random(SplitRng rng, int n, int k, const std::vector<int>& levels) {
    if (int(levels.size()) != n) throw std::invalid_argument("random embedding: need one level per depth");
    BlockEmbedding j;
    j.source_kappa = n;
    j.target_kappa = k;
    for (int i = 0; i < n; ++i) {
        int mi = levels[size_t(i)];
        if (mi > k - 1 || (i > 0 && mi <= levels[size_t(i - 1)]) || mi < i)
            throw std::invalid_argument("random embedding: bad level tuple");
        for (const auto& I : level_intervals(i)) {
            std::vector<DyadicInterval> cover;
            if (i == 0)
                cover = level_intervals(mi);
            else {
                auto set = j.sign_set(I.predecessor(), I.sign());
                for (const auto& w : set) {
                    // Refine the sign-set intervals to level mi.
                    int d = mi - w.level;
                    for (long long t = 0; t < (1LL << d); ++t)
                        cover.push_back(DyadicInterval(mi, ((w.index - 1) << d) + 1 + t));
                }
            }
            std::vector<std::pair<DyadicInterval, int>> bl;
            auto r = rng.child(uint64_t(i * 1000003) ^ uint64_t(I.index));
            for (const auto& K : cover) bl.push_back({K, r.sign()});
            j.blocks[I] = std::move(bl);
        }
    }
    j.validate();
    return j;
}

Scheme Scheme::identity(std::shared_ptr<const TruncatedTree> tree) {
    Scheme s;
    s.source = tree;
    s.target = tree;
    s.families.resize(size_t(tree->node_count()));
    for (int i = 0; i < tree->node_count(); ++i)
        s.families[size_t(i)].push_back({i, BlockEmbedding::identity(tree->nodes[size_t(i)].kappa_eff)});
    return s;
}

SchemeReport verify_scheme(const Scheme& s) {
    SchemeReport rep;
    const auto& src = *s.source;
    const auto& tgt = *s.target;
    if (s.families.size() != size_t(src.node_count())) {
        rep.fail("structure: one family required per source node");
        return rep;
    }
    for (int l = 0; l < src.node_count(); ++l) {
        const auto& fam = s.families[size_t(l)];
        const auto& ln = src.nodes[size_t(l)];
        std::string where = "at " + ln.node.str();
        if (fam.empty()) {
            rep.fail("structure: empty family " + where);
            continue;
        }
        Dyadic total = Dyadic::zero();
        for (const auto& im : fam) {
            const auto& mn = tgt.nodes[size_t(im.target_node)];
            total = total + mn.theta;
            if (im.embed.source_kappa != ln.kappa_eff || im.embed.target_kappa != mn.kappa_eff)
                rep.fail("structure: embedding dimensions disagree " + where + " -> " + mn.node.str());
            try {
                im.embed.validate();
            } catch (const std::invalid_argument& e) {
                rep.fail(std::string("embedding: ") + e.what() + " " + where);
            }
        }
        for (size_t i = 0; i < fam.size(); ++i)
            for (size_t j = i + 1; j < fam.size(); ++j) {
                int a = fam[i].target_node, b = fam[j].target_node;
                if (tgt.comparable(a, b)) {
                    rep.fail("(a-i): comparable images " + where);
                    continue;
                }
                if (!tgt.disjointly_supported(a, b))
                    rep.fail("(a-i): images not disjointly supported " + where + ": " +
                             tgt.nodes[size_t(a)].node.str() + " vs " + tgt.nodes[size_t(b)].node.str());
            }
        if (!(total == ln.theta))
            rep.fail("(a-ii): sum of image measures is " + total.str() + ", want " + ln.theta.str() +
                     " " + where);
    }
    // (b) incomparable sources map to incomparable images.
    for (int l1 = 0; l1 < src.node_count(); ++l1)
        for (int l2 = l1 + 1; l2 < src.node_count(); ++l2) {
            if (src.comparable(l1, l2)) continue;
            for (const auto& im1 : s.families[size_t(l1)])
                for (const auto& im2 : s.families[size_t(l2)])
                    if (tgt.comparable(im1.target_node, im2.target_node))
                        rep.fail("(b): comparable images for incomparable " +
                                 src.nodes[size_t(l1)].node.str() + ", " +
                                 src.nodes[size_t(l2)].node.str());
        }
    // (c) members extend a predecessor image through an admissible interval.
    for (int l = 0; l < src.node_count(); ++l) {
        const auto& ln = src.nodes[size_t(l)];
        if (ln.parent < 0) continue;
        const auto& pn = src.nodes[size_t(ln.parent)];
        const auto& edge = ln.node.entries[pn.node.length()];
        if (entry_is_ordinal(edge)) {
            rep.fail("structure: successor does not pass through an interval at " + ln.node.str());
            continue;
        }
        const auto& I = std::get<DyadicInterval>(edge);
        for (const auto& im : s.families[size_t(l)]) {
            const auto& mn = tgt.nodes[size_t(im.target_node)].node;
            bool found = false;
            for (const auto& im0 : s.families[size_t(ln.parent)]) {
                const auto& m0 = tgt.nodes[size_t(im0.target_node)];
                if (!m0.node.is_prefix_of(mn) || m0.node.length() >= mn.length()) continue;
                const auto& pe = mn.entries[m0.node.length()];
                if (entry_is_ordinal(pe)) continue;
                const auto& P = std::get<DyadicInterval>(pe);
                auto sign_set = im0.embed.sign_set(I.predecessor(), I.sign());
                IntervalSet ws;
                ws.level = sign_set.empty() ? 0 : sign_set.front().level;
                for (const auto& w : sign_set) ws.idx.insert(w.index);
                if (ws.contains(P)) {
                    found = true;
                    break;
                }
            }
            if (!found)
                rep.fail("(c): image " + mn.str() + " of " + ln.node.str() +
                         " has no admissible predecessor image");
        }
    }
    return rep;
}

namespace {

bool node_prefix(const TreeNode& p, const TreeNode& n) { return p.is_prefix_of(n); }

TreeNode with_interval(const TreeNode& base, const DyadicInterval& I) {
    TreeNode r = base;
    r.entries.push_back(Entry(I));
    return r;
}

}  // namespace

GammaCheck gamma_sums(const Scheme& s, int lambda, const TreeNode& mu0,
                      std::optional<DyadicInterval> I, std::optional<DyadicInterval> J) {
    GammaCheck out;
    const auto& src = *s.source;
    const auto& tgt = *s.target;
    validate_node(mu0);

    auto gamma_of = [&](int l, const TreeNode& prefix) {
        std::vector<int> nu;
        for (const auto& im : s.families[size_t(l)])
            if (node_prefix(prefix, tgt.nodes[size_t(im.target_node)].node)) nu.push_back(im.target_node);
        return nu;
    };

    // Minimal lambda0 on the ancestor chain with nonempty Gamma^{mu0}.
    int lambda0 = -1;
    for (int cur = lambda; cur >= 0; cur = src.nodes[size_t(cur)].parent)
        if (!gamma_of(cur, mu0).empty()) lambda0 = cur;
    if (lambda0 < 0) {
        out.detail = "no ancestor carries members above " + mu0.str();
        return out;
    }
    bool mu0_in_family = false;
    for (const auto& im : s.families[size_t(lambda0)])
        if (tgt.nodes[size_t(im.target_node)].node == mu0) mu0_in_family = true;

    Dyadic th_l = src.nodes[size_t(lambda)].theta;
    Dyadic th_l0 = src.nodes[size_t(lambda0)].theta;
    Dyadic th_mu0 = node_theta(mu0);
    // Divisors here are pure powers of two (node measures).
    auto ratio = [&](const Dyadic& a, const Dyadic& b) {
        if (b.m != 1) throw std::logic_error("gamma_sums: non-dyadic-power divisor");
        return Dyadic(a.m, a.e - b.e);
    };

    TreeNode prefix = mu0;
    if (!J) {
        // Case (a).
        out.rhs = ratio(th_mu0 * th_l, th_l0);
        out.detail = "case a";
    } else if (!mu0_in_family) {
        // Case (b).
        if (J->level != node_structure(mu0).kappa) {
            out.detail = "case b: J must lie at kappa(mu0)";
            return out;
        }
        prefix = with_interval(mu0, *J);
        out.rhs = ratio(th_mu0 * J->measure() * th_l, th_l0);
        out.detail = "case b";
    } else {
        // Case (c).
        if (!I) {
            out.detail = "case c: I required when mu0 belongs to the minimal family";
            return out;
        }
        if (I->level != src.nodes[size_t(lambda0)].kappa || J->level != node_structure(mu0).kappa) {
            out.detail = "case c: levels of I and J must match the kappas";
            return out;
        }
        // lambda must extend lambda0 through I, and J must be admissible.
        TreeNode want = with_interval(src.nodes[size_t(lambda0)].node, *I);
        if (!node_prefix(want, src.nodes[size_t(lambda)].node)) {
            out.detail = "case c: lambda does not extend lambda0 through I";
            return out;
        }
        const BlockEmbedding* emb = nullptr;
        for (const auto& im : s.families[size_t(lambda0)])
            if (tgt.nodes[size_t(im.target_node)].node == mu0) emb = &im.embed;
        auto adm = emb->admissible(*I, J->level);
        if (std::find_if(adm.begin(), adm.end(), [&](const DyadicInterval& P) { return P == *J; }) ==
            adm.end()) {
            out.detail = "case c: J is not admissible for I through J_mu0";
            return out;
        }
        prefix = with_interval(mu0, *J);
        Dyadic scaled = th_mu0 * J->measure();
        out.rhs = ratio(ratio(scaled * th_l, I->measure()), th_l0);
        out.detail = "case c";
    }

    out.applicable = true;
    Dyadic lhs = Dyadic::zero();
    for (int nu : gamma_of(lambda, prefix)) lhs = lhs + tgt.nodes[size_t(nu)].theta;
    out.lhs = lhs;
    out.equal = (out.lhs == out.rhs);
    return out;
}

SparseMat assemble(const Scheme& s, const Basis& src, const Basis& tgt) {
    SparseMat m(tgt.dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
        const auto& idx = src.items[size_t(j)];
        for (const auto& im : s.families[size_t(idx.node)]) {
            auto it = im.embed.blocks.find(idx.interval);
            if (it == im.embed.blocks.end())
                throw std::invalid_argument("assemble: embedding lacks blocks for " +
                                            idx.interval.str());
            for (const auto& [K, sign] : it->second) {
                int row = tgt.find(im.target_node, K);
                if (row < 0)
                    throw std::invalid_argument("assemble: target basis lacks vector at " + K.str());
                m.add(row, j, Rat(sign));
            }
        }
    }
    m.sort_compress();
    return m;
}

DistributionalReport verify_distributional(const Scheme& s, const Basis& src, const Basis& tgt,
                                           int samples, SplitRng rng, int cap, int threads) {
    DistributionalReport rep;
    rep.samples = samples;
    SparseMat m = assemble(s, src, tgt);

    // Exact Gram isometry of all basis pairs.
    std::vector<SparseVec> cols(size_t(src.dim()));
    for (int j = 0; j < src.dim(); ++j) cols[size_t(j)].nz = m.col[size_t(j)];
    for (int j = 0; j < src.dim(); ++j)
        for (int k = j; k < src.dim(); ++k) {
            Rat got = cols[size_t(j)].dot_weighted(cols[size_t(k)], tgt.gram);
            Rat want = j == k ? src.gram[size_t(j)].to_rat() : Rat(0);
            if (got != want)
                rep.failures.push_back("gram: <Tb_" + std::to_string(j) + ", Tb_" + std::to_string(k) +
                                       "> = " + rat_str(got) + ", want " + rat_str(want));
        }

    auto run_sample = [&](int sample) -> std::string {
        SplitRng r = rng.child(uint64_t(sample));
        SparseVec f;
        for (int i = 0; i < src.dim(); ++i) {
            long long num = (long long)r.below(15) - 7;
            int de = int(r.below(3));
            if (num != 0) f.add(i, Rat(num, 1LL << de));
        }
        f.sort_compress();
        if (f.nz.empty()) f.add(0, Rat(1));
        Distribution df = src.span_distribution(f, cap);
        SparseVec g = m.apply(f);
        Distribution dg = tgt.span_distribution(g, cap);
        if (!(df == dg)) return "sample " + std::to_string(sample) + ": distribution mismatch";
        return "";
    };

    std::vector<std::string> results(size_t(samples));
    if (threads <= 1) {
        for (int i = 0; i < samples; ++i) results[size_t(i)] = run_sample(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&]() {
                for (int i = next.fetch_add(1); i < samples; i = next.fetch_add(1))
                    results[size_t(i)] = run_sample(i);
            });
        for (auto& th : pool) th.join();
    }
    for (auto& r : results)
        if (!r.empty()) rep.failures.push_back(r);
    rep.pass = rep.failures.empty();
    return rep;
}

namespace {

struct Relocation {
    Ordinal alpha;
    std::vector<TreeNode> nodes;
    std::map<std::string, int> keff;
    std::map<std::string, std::string> back;  // new key -> original key
};

// Strip `prefix_len` entries (concatenation inverse).
TreeNode strip(const TreeNode& n, size_t prefix_len) {
    return TreeNode(std::vector<Entry>(n.entries.begin() + (long)prefix_len, n.entries.end()));
}

// Gluing inverse: replace the length-`prefix_len` prefix by its last entry.
TreeNode unglue(const TreeNode& n, size_t prefix_len) {
    std::vector<Entry> es;
    es.push_back(n.entries[prefix_len - 1]);
    es.insert(es.end(), n.entries.begin() + (long)prefix_len, n.entries.end());
    return TreeNode(es);
}

Relocation relocate(const TruncatedTree& t, const TreeNode& prefix, bool glued,
                    std::optional<DyadicInterval> through) {
    Relocation out;
    TreeNode full = prefix;
    if (through) full.entries.push_back(Entry(*through));
    size_t plen = full.length();
    for (const auto& rn : t.nodes) {
        bool take = glued ? (full.is_prefix_of(rn.node) && (rn.node.length() > plen || rn.node == full))
                          : (full.is_prefix_of(rn.node) && rn.node.length() > plen);
        if (glued && rn.node == full) take = true;
        if (!take) continue;
        TreeNode moved = glued ? unglue(rn.node, plen) : strip(rn.node, plen);
        out.nodes.push_back(moved);
        out.keff[moved.key()] = rn.kappa_eff;
        out.back[moved.key()] = rn.node.key();
    }
    if (out.nodes.empty()) throw std::invalid_argument("extract: empty relocated tree");
    out.alpha = std::get<Ordinal>(out.nodes.front().entries[0]);
    return out;
}

}  // namespace

Scheme extract_subscheme(const Scheme& s, const ExtractAnchor& anchor) {
    const auto& src = *s.source;
    const auto& tgt = *s.target;
    if (anchor.lambda0 < 0 || anchor.lambda0 >= src.node_count())
        throw std::invalid_argument("extract: bad lambda0");
    const auto& l0 = src.nodes[size_t(anchor.lambda0)];
    int mu0_idx = tgt.find(anchor.mu0);
    if (mu0_idx < 0) throw std::invalid_argument("extract: mu0 not in target tree");

    Relocation nsrc, ntgt;
    size_t tgt_plen = 0;
    bool src_glued = false, tgt_glued = false;

    switch (anchor.form) {
        case ExtractForm::ThroughIntervals: {
            if (!anchor.I || !anchor.J) throw std::invalid_argument("extract: form needs I and J");
            const BlockEmbedding* emb = nullptr;
            for (const auto& im : s.families[size_t(anchor.lambda0)])
                if (im.target_node == mu0_idx) emb = &im.embed;
            if (!emb) throw std::invalid_argument("extract: mu0 must belong to the family of lambda0");
            if (anchor.I->level != l0.kappa || anchor.J->level != tgt.nodes[size_t(mu0_idx)].kappa)
                throw std::invalid_argument("extract: interval levels must match the kappas");
            auto adm = emb->admissible(*anchor.I, anchor.J->level);
            if (std::find_if(adm.begin(), adm.end(),
                             [&](const DyadicInterval& P) { return P == *anchor.J; }) == adm.end())
                throw std::invalid_argument("extract: J is not admissible for I through J_mu0");
            nsrc = relocate(src, l0.node, false, *anchor.I);
            ntgt = relocate(tgt, anchor.mu0, false, *anchor.J);
            tgt_plen = anchor.mu0.length() + 1;
            break;
        }
        case ExtractForm::RootThroughInterval: {
            if (!anchor.J) throw std::invalid_argument("extract: form needs J");
            if (l0.parent >= 0) throw std::invalid_argument("extract: lambda0 must be a root");
            nsrc = relocate(src, l0.node, true, std::nullopt);
            ntgt = relocate(tgt, anchor.mu0, false, *anchor.J);
            tgt_plen = anchor.mu0.length() + 1;
            src_glued = true;
            break;
        }
        case ExtractForm::Glued: {
            nsrc = relocate(src, l0.node, true, std::nullopt);
            ntgt = relocate(tgt, anchor.mu0, true, std::nullopt);
            tgt_plen = anchor.mu0.length();
            src_glued = true;
            tgt_glued = true;
            break;
        }
    }

    auto new_src = std::make_shared<TruncatedTree>(
        TruncatedTree::from_nodes(nsrc.alpha, nsrc.nodes, nsrc.keff, src.budget, src.alloc));
    auto new_tgt = std::make_shared<TruncatedTree>(
        TruncatedTree::from_nodes(ntgt.alpha, ntgt.nodes, ntgt.keff, tgt.budget, tgt.alloc));

    Scheme out;
    out.source = new_src;
    out.target = new_tgt;
    out.families.resize(size_t(new_src->node_count()));
    TreeNode tgt_prefix = anchor.mu0;
    if (anchor.form != ExtractForm::Glued) tgt_prefix.entries.push_back(Entry(*anchor.J));

    for (int nl = 0; nl < new_src->node_count(); ++nl) {
        const TreeNode& moved = new_src->nodes[size_t(nl)].node;
        // Recover the original source node.
        TreeNode orig;
        if (src_glued) {
            orig = l0.node;
            orig.entries.insert(orig.entries.end(), moved.entries.begin() + 1, moved.entries.end());
        } else {
            orig = l0.node;
            orig.entries.push_back(Entry(*anchor.I));
            orig.entries.insert(orig.entries.end(), moved.entries.begin(), moved.entries.end());
        }
        int ol = src.find(orig);
        if (ol < 0) throw std::logic_error("extract: lost original source node " + orig.str());
        for (const auto& im : s.families[size_t(ol)]) {
            const TreeNode& mn = tgt.nodes[size_t(im.target_node)].node;
            if (!tgt_prefix.is_prefix_of(mn)) continue;
            TreeNode movedt = tgt_glued ? unglue(mn, tgt_plen) : strip(mn, tgt_plen);
            int nt = new_tgt->find(movedt);
            if (nt < 0) throw std::logic_error("extract: lost relocated target node " + movedt.str());
            out.families[size_t(nl)].push_back({nt, im.embed});
        }
        if (out.families[size_t(nl)].empty())
            throw std::invalid_argument("extract: empty family for " + moved.str() +
                                        " (anchor hypotheses unmet)");
    }
    return out;
}

}  // namespace brs
