#include "brs/digit_program.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace brs {

DigitProgram::DigitProgram(int budget_, std::vector<std::pair<int, int>> cons, std::vector<int> rds)
    : budget(budget_), constraints(std::move(cons)), reads(std::move(rds)) {
    std::sort(constraints.begin(), constraints.end());
    validate();
}

DigitProgram DigitProgram::identity(int m, int budget) {
    DigitProgram p;
    p.budget = budget < 0 ? m : budget;
    p.reads.resize(size_t(m));
    std::iota(p.reads.begin(), p.reads.end(), 0);
    p.validate();
    return p;
}

DigitProgram DigitProgram::interval(const DyadicInterval& I, int inner_reads) {
    DigitProgram p;
    p.budget = I.level + inner_reads;
    for (int j = 0; j < I.level; ++j) {
        int bit = int(((I.index - 1) >> (I.level - 1 - j)) & 1);
        p.constraints.push_back({j, bit});
    }
    for (int j = 0; j < inner_reads; ++j) p.reads.push_back(I.level + j);
    p.validate();
    return p;
}

void DigitProgram::validate() const {
    std::vector<int> seen;
    for (const auto& [pos, bit] : constraints) {
        if (pos < 0 || pos >= budget) throw std::invalid_argument("digit program: constraint out of budget");
        if (bit != 0 && bit != 1) throw std::invalid_argument("digit program: bit must be 0/1");
        seen.push_back(pos);
    }
    for (int pos : reads) {
        if (pos < 0 || pos >= budget) throw std::invalid_argument("digit program: read out of budget");
        seen.push_back(pos);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::invalid_argument("digit program: positions not pairwise distinct");
}

std::vector<int> DigitProgram::touched_positions() const {
    std::vector<int> out;
    for (const auto& [pos, bit] : constraints) out.push_back(pos);
    for (int pos : reads) out.push_back(pos);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> DigitProgram::used_positions(int resolution) const {
    std::vector<int> out;
    for (const auto& [pos, bit] : constraints) out.push_back(pos);
    for (int j = 0; j < resolution && j < int(reads.size()); ++j) out.push_back(reads[size_t(j)]);
    std::sort(out.begin(), out.end());
    return out;
}

DigitProgram compose(const DigitProgram& outer, const DigitProgram& inner) {
    if (int(outer.reads.size()) < inner.budget)
        throw std::invalid_argument("compose: outer reads fewer positions than inner budget");
    DigitProgram r;
    r.budget = outer.budget;
    r.constraints = outer.constraints;
    for (const auto& [pos, bit] : inner.constraints)
        r.constraints.push_back({outer.reads[size_t(pos)], bit});
    std::sort(r.constraints.begin(), r.constraints.end());
    for (int pos : inner.reads) r.reads.push_back(outer.reads[size_t(pos)]);
    r.validate();
    return r;
}

bool constraints_contradict(const DigitProgram& a, const DigitProgram& b) {
    for (const auto& [pa, ba] : a.constraints)
        for (const auto& [pb, bb] : b.constraints)
            if (pa == pb && ba != bb) return true;
    return false;
}

StepFunction apply_program(const DigitProgram& p, const StepFunction& f) {
    if (f.resolution > int(p.reads.size()))
        throw std::invalid_argument("apply_program: resolution exceeds read count");
    if (p.budget > 26) throw std::invalid_argument("apply_program: budget too large to materialize");
    StepFunction g = StepFunction::constant(Rat(0), p.budget);
    for (long long cell = 0; cell < (1LL << p.budget); ++cell) {
        // Digit j of the dyadic expansion is bit (budget-1-j) of the index.
        bool ok = true;
        for (const auto& [pos, bit] : p.constraints)
            if (int((cell >> (p.budget - 1 - pos)) & 1) != bit) {
                ok = false;
                break;
            }
        if (!ok) continue;
        long long idx = 0;
        for (int j = 0; j < f.resolution; ++j)
            idx = (idx << 1) | ((cell >> (p.budget - 1 - p.reads[size_t(j)])) & 1);
        g.cells[size_t(cell)] = f.value_at_cell(idx);
    }
    return g;
}

namespace {

// Per-item view with positions remapped to a component-local cube.
struct LocalItem {
    uint64_t cmask = 0, cbits = 0;
    std::vector<int> read_shifts;  // local bit index per read, most significant first
    const StepFunction* f = nullptr;
    Rat coeff;
};

std::vector<int> union_positions(const std::vector<const GridItem*>& items) {
    std::vector<int> pos;
    for (const auto* it : items)
        for (int p : it->prog.used_positions(it->f.resolution)) pos.push_back(p);
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    return pos;
}

LocalItem localize(const GridItem& item, const std::vector<int>& positions) {
    LocalItem li;
    li.f = &item.f;
    li.coeff = item.coeff;
    auto local = [&](int pos) {
        return int(std::lower_bound(positions.begin(), positions.end(), pos) - positions.begin());
    };
    for (const auto& [pos, bit] : item.prog.constraints) {
        li.cmask |= 1ULL << local(pos);
        if (bit) li.cbits |= 1ULL << local(pos);
    }
    for (int j = 0; j < item.f.resolution; ++j) li.read_shifts.push_back(local(item.prog.reads[size_t(j)]));
    return li;
}

Rat eval_local(const LocalItem& li, uint64_t cell) {
    if ((cell & li.cmask) != li.cbits) return Rat(0);
    long long idx = 0;
    for (int sh : li.read_shifts) idx = (idx << 1) | ((cell >> sh) & 1);
    return li.coeff * li.f->value_at_cell(idx);
}

// Accumulate the component's nonzero cell values; untouched cells are 0.
std::unordered_map<uint64_t, Rat> component_cells(const std::vector<const GridItem*>& items,
                                                  const std::vector<int>& positions, int cap) {
    int P = int(positions.size());
    if (P > cap) throw std::runtime_error("atomization: component exceeds position cap");
    std::unordered_map<uint64_t, Rat> cells;
    for (const auto* itp : items) {
        LocalItem li = localize(*itp, positions);
        // Enumerate only cells satisfying the item's constraints.
        uint64_t free_mask = ((P == 64 ? ~0ULL : (1ULL << P) - 1)) & ~li.cmask;
        uint64_t sub = 0;
        while (true) {
            uint64_t cell = sub | li.cbits;
            long long idx = 0;
            for (int sh : li.read_shifts) idx = (idx << 1) | ((cell >> sh) & 1);
            const Rat& v = li.f->value_at_cell(idx);
            if (sgn(v) != 0) cells[cell] += li.coeff * v;
            if (free_mask == 0) break;
            sub = (sub - free_mask) & free_mask;
            if (sub == 0) break;
        }
    }
    return cells;
}

struct Component {
    std::vector<const GridItem*> items;
    std::vector<int> positions;
};

std::vector<Component> split_components(const std::vector<const GridItem*>& items) {
    size_t n = items.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[size_t(x)] == x ? x : parent[size_t(x)] = find(parent[size_t(x)]); };
    std::unordered_map<int, int> owner;  // position -> item representative
    for (size_t i = 0; i < n; ++i)
        for (int p : items[i]->prog.used_positions(items[i]->f.resolution)) {
            auto it = owner.find(p);
            if (it == owner.end())
                owner[p] = int(i);
            else
                parent[size_t(find(int(i)))] = find(it->second);
        }
    std::unordered_map<int, Component> comps;
    for (size_t i = 0; i < n; ++i) comps[find(int(i))].items.push_back(items[i]);
    std::vector<Component> out;
    for (auto& [root, c] : comps) {
        c.positions = union_positions(c.items);
        out.push_back(std::move(c));
    }
    // Deterministic order: by first touched position.
    std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
        if (a.positions.empty() || b.positions.empty()) return a.positions.size() < b.positions.size();
        return a.positions[0] < b.positions[0];
    });
    return out;
}

Distribution component_distribution(const Component& c, int cap) {
    auto cells = component_cells(c.items, c.positions, cap);
    int P = int(c.positions.size());
    Distribution d;
    long long zero_cells = (1LL << P) - (long long)cells.size();
    for (const auto& [cell, v] : cells) d.add_mass(v, Dyadic::pow2(P));
    if (zero_cells > 0) d.add_mass(Rat(0), Dyadic(zero_cells, P));
    return d;
}

}  // namespace

Distribution grid_distribution(const std::vector<GridItem>& items, int component_cap) {
    std::vector<const GridItem*> ptrs;
    for (const auto& it : items) ptrs.push_back(&it);
    Distribution acc = Distribution::point(Rat(0));
    for (const auto& c : split_components(ptrs))
        acc = convolve_independent(acc, component_distribution(c, component_cap));
    return acc;
}

Rat grid_inner_product(const std::vector<GridItem>& a, const std::vector<GridItem>& b,
                       int component_cap) {
    std::vector<const GridItem*> all;
    for (const auto& it : a) all.push_back(&it);
    for (const auto& it : b) all.push_back(&it);
    auto comps = split_components(all);

    std::unordered_set<const GridItem*> aset;
    for (const auto& it : a) aset.insert(&it);
    auto in_a = [&](const GridItem* p) { return aset.count(p) > 0; };

    Rat total = 0;    // sum over components of E[A_c B_c] - E[A_c] E[B_c]
    Rat mean_a = 0, mean_b = 0;
    for (const auto& c : comps) {
        std::vector<const GridItem*> ca, cb;
        for (const auto* p : c.items) (in_a(p) ? ca : cb).push_back(p);
        int P = int(c.positions.size());
        if (P > component_cap) throw std::runtime_error("inner product: component exceeds position cap");
        auto cells_a = component_cells(ca, c.positions, component_cap);
        auto cells_b = component_cells(cb, c.positions, component_cap);
        Rat ma = 0, mb = 0, mab = 0;
        for (const auto& [cell, v] : cells_a) {
            ma += v;
            auto it = cells_b.find(cell);
            if (it != cells_b.end()) mab += v * it->second;
        }
        for (const auto& [cell, v] : cells_b) mb += v;
        Rat scale = Dyadic::pow2(P).to_rat();
        ma *= scale;
        mb *= scale;
        mab *= scale;
        total += mab - ma * mb;
        mean_a += ma;
        mean_b += mb;
    }
    return total + mean_a * mean_b;
}

void enumerate_joint(const std::vector<GridItem>& items, int position_cap,
                     const std::function<void(const std::vector<Rat>&)>& per_cell,
                     int* positions_out) {
    std::vector<const GridItem*> ptrs;
    for (const auto& it : items) ptrs.push_back(&it);
    auto positions = union_positions(ptrs);
    int P = int(positions.size());
    if (P > position_cap) throw std::runtime_error("enumerate_joint: position cap exceeded");
    if (positions_out) *positions_out = P;
    std::vector<LocalItem> locals;
    for (const auto& it : items) locals.push_back(localize(it, positions));
    std::vector<Rat> values(items.size());
    for (uint64_t cell = 0; cell < (1ULL << P); ++cell) {
        for (size_t j = 0; j < locals.size(); ++j) values[j] = eval_local(locals[j], cell);
        per_cell(values);
    }
}

}  // namespace brs
