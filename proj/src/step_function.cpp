#include "brs/step_function.hpp"

#include <cmath>
#include <stdexcept>

namespace brs {

StepFunction::StepFunction(int res, std::vector<Rat> vals) : resolution(res), cells(std::move(vals)) {
    if (res < 0 || res > 30) throw std::invalid_argument("step function: resolution out of range");
    if (cells.size() != (size_t(1) << res))
        throw std::invalid_argument("step function: cell count mismatch");
}

StepFunction StepFunction::constant(const Rat& c, int res) {
    return StepFunction(res, std::vector<Rat>(size_t(1) << res, c));
}

StepFunction StepFunction::indicator(const DyadicInterval& I) {
    StepFunction f = constant(Rat(0), I.level);
    f.cells[size_t(I.index - 1)] = 1;
    return f;
}

Rat StepFunction::mean() const {
    Rat s = 0;
    for (const auto& c : cells) s += c;
    return s / Rat(cell_count());
}

StepFunction StepFunction::refined(int new_resolution) const {
    if (new_resolution < resolution) throw std::invalid_argument("refined: coarser resolution");
    int shift = new_resolution - resolution;
    std::vector<Rat> vals(size_t(1) << new_resolution);
    for (long long i = 0; i < (1LL << new_resolution); ++i) vals[size_t(i)] = cells[size_t(i >> shift)];
    return StepFunction(new_resolution, std::move(vals));
}

bool operator==(const StepFunction& f, const StepFunction& g) {
    int r = std::max(f.resolution, g.resolution);
    return f.refined(r).cells == g.refined(r).cells;
}

StepFunction operator+(const StepFunction& f, const StepFunction& g) {
    int r = std::max(f.resolution, g.resolution);
    StepFunction a = f.refined(r), b = g.refined(r);
    for (size_t i = 0; i < a.cells.size(); ++i) a.cells[i] += b.cells[i];
    return a;
}

StepFunction operator*(const Rat& c, const StepFunction& f) {
    StepFunction g = f;
    for (auto& v : g.cells) v *= c;
    return g;
}

StepFunction haar(const DyadicInterval& I) {
    StepFunction f = StepFunction::constant(Rat(0), I.level + 1);
    f.cells[size_t(2 * (I.index - 1))] = 1;
    f.cells[size_t(2 * (I.index - 1) + 1)] = -1;
    return f;
}

StepFunction compress_interval(const StepFunction& f, const DyadicInterval& I) {
    int res = f.resolution + I.level;
    StepFunction g = StepFunction::constant(Rat(0), res);
    long long base = (I.index - 1) << f.resolution;
    for (long long i = 0; i < f.cell_count(); ++i) g.cells[size_t(base + i)] = f.cells[size_t(i)];
    return g;
}

StepFunction q_inverse(const StepFunction& f, const DyadicInterval& I) {
    if (f.resolution < I.level) throw std::invalid_argument("q_inverse: resolution below level");
    int res = f.resolution - I.level;
    long long base = (I.index - 1) << res;
    std::vector<Rat> vals(size_t(1) << res);
    for (long long i = 0; i < (1LL << res); ++i) vals[size_t(i)] = f.cells[size_t(base + i)];
    return StepFunction(res, std::move(vals));
}

StepFunction conditional_expectation(const StepFunction& f, int level) {
    if (level >= f.resolution) return f;
    if (level < 0) throw std::invalid_argument("conditional_expectation: negative level");
    int shift = f.resolution - level;
    std::vector<Rat> vals(size_t(1) << level, Rat(0));
    for (long long i = 0; i < f.cell_count(); ++i) vals[size_t(i >> shift)] += f.cells[size_t(i)];
    Rat scale = Rat(1, 1LL << shift);
    for (auto& v : vals) v *= scale;
    return StepFunction(level, std::move(vals));
}

Distribution distribution_of(const StepFunction& f) {
    Distribution d;
    Dyadic cell_mass = Dyadic::pow2(f.resolution);
    for (const auto& v : f.cells) d.add_mass(v, cell_mass);
    return d;
}

Rat inner_product(const StepFunction& f, const StepFunction& g) {
    int r = std::max(f.resolution, g.resolution);
    StepFunction a = f.refined(r), b = g.refined(r);
    Rat s = 0;
    for (size_t i = 0; i < a.cells.size(); ++i) s += a.cells[i] * b.cells[i];
    return s / Rat(1LL << r);
}

HaarExpansion indicator_in_haar(const DyadicInterval& I) {
    HaarExpansion e;
    e.const_coeff = I.measure().to_rat();
    // chi_I = (1/2)(chi_pi(I) + eps(I) h_pi(I)), iterated up to the root.
    DyadicInterval cur = I;
    Rat scale = e.const_coeff;
    while (cur.level > 0) {
        DyadicInterval up = cur.predecessor();
        e.haar_coeffs[up] = scale * Rat(cur.sign());
        scale *= 2;
        cur = up;
    }
    return e;
}

Rat lp_power_sum(const Distribution& d, unsigned p) {
    Rat s = 0;
    for (const auto& [v, m] : d.atoms) s += m.to_rat() * rat_pow(rat_abs(v), p);
    return s;
}

double lp_norm(const Distribution& d, double p) {
    double s = 0;
    for (const auto& [v, m] : d.atoms) s += m.to_double() * std::pow(std::fabs(rat_double(v)), p);
    return std::pow(s, 1.0 / p);
}

}  // namespace brs
