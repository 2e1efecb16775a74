#include "brs/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace brs {

void SparseVec::add(int i, const Rat& v) {
    if (sgn(v) != 0) nz.push_back({i, v});
}

void SparseVec::sort_compress() {
    std::sort(nz.begin(), nz.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, Rat>> out;
    for (auto& [i, v] : nz) {
        if (!out.empty() && out.back().first == i)
            out.back().second += v;
        else
            out.push_back({i, v});
    }
    std::erase_if(out, [](const auto& p) { return sgn(p.second) == 0; });
    nz = std::move(out);
}

Rat SparseVec::dot(const SparseVec& other) const {
    Rat s = 0;
    size_t i = 0, j = 0;
    while (i < nz.size() && j < other.nz.size()) {
        if (nz[i].first < other.nz[j].first)
            ++i;
        else if (nz[i].first > other.nz[j].first)
            ++j;
        else {
            s += nz[i].second * other.nz[j].second;
            ++i;
            ++j;
        }
    }
    return s;
}

Rat SparseVec::dot_weighted(const SparseVec& other, const std::vector<Dyadic>& w) const {
    Rat s = 0;
    size_t i = 0, j = 0;
    while (i < nz.size() && j < other.nz.size()) {
        if (nz[i].first < other.nz[j].first)
            ++i;
        else if (nz[i].first > other.nz[j].first)
            ++j;
        else {
            s += nz[i].second * other.nz[j].second * w[size_t(nz[i].first)].to_rat();
            ++i;
            ++j;
        }
    }
    return s;
}

void SparseMat::sort_compress() {
    for (auto& c : col) {
        std::sort(c.begin(), c.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<int, Rat>> out;
        for (auto& [i, v] : c) {
            if (!out.empty() && out.back().first == i)
                out.back().second += v;
            else
                out.push_back({i, v});
        }
        std::erase_if(out, [](const auto& p) { return sgn(p.second) == 0; });
        c = std::move(out);
    }
}

SparseVec SparseMat::apply(const SparseVec& x) const {
    SparseVec y;
    for (const auto& [j, xv] : x.nz)
        for (const auto& [i, av] : col[size_t(j)]) y.nz.push_back({i, av * xv});
    y.sort_compress();
    return y;
}

Rat SparseMat::entry(int r, int c) const {
    for (const auto& [i, v] : col[size_t(c)])
        if (i == r) return v;
    return Rat(0);
}

DenseMat DenseMat::identity(int n) {
    DenseMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

DenseMat operator*(const DenseMat& x, const DenseMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matrix multiply: shape mismatch");
    DenseMat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Rat& v = x.at(i, k);
            if (sgn(v) == 0) continue;
            for (int j = 0; j < y.cols; ++j) z.at(i, j) += v * y.at(k, j);
        }
    return z;
}

DenseMat operator-(const DenseMat& x, const DenseMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("matrix minus: shape mismatch");
    DenseMat z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

DenseMat DenseMat::transposed() const {
    DenseMat t(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
    return t;
}

Rat DenseMat::max_abs() const {
    Rat m = 0;
    for (const auto& v : a) m = std::max(m, rat_abs(v));
    return m;
}

DenseMat inverse(const DenseMat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("inverse: not square");
    int n = m.rows;
    DenseMat a = m, inv = DenseMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r)
            if (sgn(a.at(r, c)) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw std::domain_error("inverse: singular matrix");
        if (pivot != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(pivot, j), a.at(c, j));
                std::swap(inv.at(pivot, j), inv.at(c, j));
            }
        Rat d = a.at(c, c);
        for (int j = 0; j < n; ++j) {
            a.at(c, j) /= d;
            inv.at(c, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            Rat f = a.at(r, c);
            if (sgn(f) == 0) continue;
            for (int j = 0; j < n; ++j) {
                a.at(r, j) -= f * a.at(c, j);
                inv.at(r, j) -= f * inv.at(c, j);
            }
        }
    }
    return inv;
}

bool is_positive_semidefinite(DenseMat m) {
    if (m.rows != m.cols) throw std::invalid_argument("psd: not square");
    int n = m.rows;
    // LDL^T with diagonal pivoting restricted to the natural order; a zero
    // pivot requires a zero row/column in the remaining block.
    for (int k = 0; k < n; ++k) {
        const Rat& d = m.at(k, k);
        int s = sgn(d);
        if (s < 0) return false;
        if (s == 0) {
            for (int j = k + 1; j < n; ++j)
                if (sgn(m.at(k, j)) != 0 || sgn(m.at(j, k)) != 0) return false;
            continue;
        }
        for (int i = k + 1; i < n; ++i) {
            Rat f = m.at(i, k) / d;
            if (sgn(f) == 0) continue;
            for (int j = k + 1; j < n; ++j) m.at(i, j) -= f * m.at(k, j);
        }
        for (int i = k + 1; i < n; ++i) {
            m.at(i, k) = 0;
            m.at(k, i) = 0;
        }
    }
    return true;
}

}  // namespace brs
