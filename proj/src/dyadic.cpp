#include "brs/dyadic.hpp"

#include <stdexcept>

namespace brs {

DyadicInterval::DyadicInterval(int lvl, long long idx) : level(lvl), index(idx) {
    if (lvl < 0 || lvl > 62) throw std::invalid_argument("dyadic interval: level out of range");
    if (idx < 1 || idx > (1LL << lvl)) throw std::invalid_argument("dyadic interval: bad index");
}

DyadicInterval DyadicInterval::predecessor() const {
    if (level == 0) throw std::domain_error("root interval has no predecessor");
    return DyadicInterval(level - 1, (index + 1) / 2);
}

int DyadicInterval::sign() const {
    if (level == 0) throw std::domain_error("root interval has no sign");
    return (index & 1) ? 1 : -1;
}

bool DyadicInterval::contains(const DyadicInterval& other) const {
    if (other.level < level) return false;
    long long shifted = (other.index - 1) >> (other.level - level);
    return shifted == index - 1;
}

DyadicInterval DyadicInterval::relative_to(const DyadicInterval& outer) const {
    if (!outer.contains(*this)) throw std::invalid_argument("relative_to: not nested");
    int lvl = level - outer.level;
    long long idx = (index - 1) - ((outer.index - 1) << lvl);
    return DyadicInterval(lvl, idx + 1);
}

std::string DyadicInterval::str() const {
    return "[" + std::to_string(index - 1) + "/2^" + std::to_string(level) + "," +
           std::to_string(index) + "/2^" + std::to_string(level) + ")";
}

int lex_order(const DyadicInterval& a, const DyadicInterval& b) {
    if (a.level != b.level) return a.level < b.level ? -1 : 1;
    if (a.index != b.index) return a.index < b.index ? -1 : 1;
    return 0;
}

std::vector<DyadicInterval> level_intervals(int n) {
    std::vector<DyadicInterval> out;
    out.reserve(size_t(1) << n);
    for (long long i = 1; i <= (1LL << n); ++i) out.emplace_back(n, i);
    return out;
}

std::vector<DyadicInterval> intervals_up_to(int n) {
    std::vector<DyadicInterval> out;
    for (int k = 0; k <= n; ++k)
        for (long long i = 1; i <= (1LL << k); ++i) out.emplace_back(k, i);
    return out;
}

Distribution Distribution::point(const Rat& value) {
    Distribution d;
    d.atoms[value] = Dyadic::one();
    return d;
}

void Distribution::add_mass(const Rat& value, const Dyadic& mass) {
    if (mass.is_zero()) return;
    auto it = atoms.find(value);
    if (it == atoms.end()) {
        atoms.emplace(value, mass);
    } else {
        it->second = it->second + mass;
        if (it->second.is_zero()) atoms.erase(it);
    }
}

Dyadic Distribution::total_mass() const {
    Dyadic t;
    for (const auto& [v, m] : atoms) t = t + m;
    return t;
}

Distribution compress_distribution(const Distribution& d, const Dyadic& theta) {
    if (theta.is_zero() || Dyadic::one() < theta)
        throw std::invalid_argument("compress_distribution: theta outside (0,1]");
    Distribution out;
    for (const auto& [v, m] : d.atoms) out.add_mass(v, theta * m);
    out.add_mass(Rat(0), Dyadic::one() - theta);
    return out;
}

Distribution convolve_independent(const Distribution& a, const Distribution& b) {
    Distribution out;
    for (const auto& [va, ma] : a.atoms)
        for (const auto& [vb, mb] : b.atoms) out.add_mass(va + vb, ma * mb);
    return out;
}

}  // namespace brs
