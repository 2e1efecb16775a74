#pragma once

#include <vector>

#include "brs/rational.hpp"

namespace brs {

using RatVec = std::vector<Rat>;

// Sorted sparse vector of rational entries.
struct SparseVec {
    std::vector<std::pair<int, Rat>> nz;

    void add(int i, const Rat& v);
    void sort_compress();
    Rat dot(const SparseVec& other) const;
    Rat dot_weighted(const SparseVec& other, const std::vector<Dyadic>& w) const;
};

// Column-major sparse rational matrix.
struct SparseMat {
    int rows = 0, cols = 0;
    std::vector<std::vector<std::pair<int, Rat>>> col;

    SparseMat() = default;
    SparseMat(int r, int c) : rows(r), cols(c), col(size_t(c)) {}

    void add(int r, int c, const Rat& v) { col[size_t(c)].push_back({r, v}); }
    void sort_compress();
    SparseVec apply(const SparseVec& x) const;
    Rat entry(int r, int c) const;
};

struct DenseMat {
    int rows = 0, cols = 0;
    RatVec a;

    DenseMat() = default;
    DenseMat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), Rat(0)) {}
    static DenseMat identity(int n);

    Rat& at(int r, int c) { return a[size_t(r) * size_t(cols) + size_t(c)]; }
    const Rat& at(int r, int c) const { return a[size_t(r) * size_t(cols) + size_t(c)]; }

    friend DenseMat operator*(const DenseMat& x, const DenseMat& y);
    friend DenseMat operator-(const DenseMat& x, const DenseMat& y);
    DenseMat transposed() const;
    Rat max_abs() const;
};

// Exact inverse by Gauss-Jordan elimination. Throws on singular input.
DenseMat inverse(const DenseMat& m);

// Exact test for positive semidefiniteness of a symmetric rational matrix
// (LDL^T elimination with pivot sign checks).
bool is_positive_semidefinite(DenseMat m);

}  // namespace brs
