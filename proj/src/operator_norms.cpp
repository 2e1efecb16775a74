#include "brs/operator_norms.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace brs {

namespace {

std::vector<double> gram_doubles(const std::vector<Dyadic>& g) {
    std::vector<double> d(g.size());
    for (size_t i = 0; i < g.size(); ++i) d[i] = g[i].to_double();
    return d;
}

}  // namespace

double l2_power_lower(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                      const std::vector<Dyadic>& gram_tgt, int iters) {
    int nc = m.cols, nr = m.rows;
    auto ds = gram_doubles(gram_src), dt = gram_doubles(gram_tgt);
    std::vector<std::vector<double>> md(size_t(nr), std::vector<double>(size_t(nc)));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) md[size_t(i)][size_t(j)] = rat_double(m.at(i, j));

    double best = 0;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int start = 0; start < 3; ++start) {
        std::vector<double> x(size_t(nc));
        for (auto& v : x) v = unif(rng);
        for (int it = 0; it < iters; ++it) {
            // y = M x, then x <- D_src^{-1} M^T D_tgt y.
            std::vector<double> y(size_t(nr), 0.0);
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < nc; ++j) y[size_t(i)] += md[size_t(i)][size_t(j)] * x[size_t(j)];
            double num = 0, den = 0;
            for (int i = 0; i < nr; ++i) num += dt[size_t(i)] * y[size_t(i)] * y[size_t(i)];
            for (int j = 0; j < nc; ++j) den += ds[size_t(j)] * x[size_t(j)] * x[size_t(j)];
            if (den > 0) best = std::max(best, std::sqrt(num / den));
            std::vector<double> nx(size_t(nc), 0.0);
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < nc; ++j)
                    nx[size_t(j)] += md[size_t(i)][size_t(j)] * dt[size_t(i)] * y[size_t(i)];
            double norm = 0;
            for (int j = 0; j < nc; ++j) {
                nx[size_t(j)] /= ds[size_t(j)];
                norm += nx[size_t(j)] * nx[size_t(j)];
            }
            norm = std::sqrt(norm);
            if (norm == 0) break;
            for (auto& v : nx) v /= norm;
            x = std::move(nx);
        }
    }
    return best;
}

double l2_certified_upper(const DenseMat& m, const std::vector<Dyadic>& gram_src,
                          const std::vector<Dyadic>& gram_tgt, double rel_tol) {
    int nc = m.cols;
    // Normal matrix N = M^T D_tgt M (symmetric PSD in the D_src geometry).
    DenseMat normal(nc, nc);
    for (int j = 0; j < nc; ++j)
        for (int k = j; k < nc; ++k) {
            Rat s = 0;
            for (int i = 0; i < m.rows; ++i) {
                const Rat& x = m.at(i, j);
                if (sgn(x) == 0) continue;
                s += x * m.at(i, k) * gram_tgt[size_t(i)].to_rat();
            }
            normal.at(j, k) = s;
            normal.at(k, j) = s;
        }
    auto dominated = [&](const Rat& t2) {
        // t2 * D_src - N >= 0 ?
        DenseMat g(nc, nc);
        for (int j = 0; j < nc; ++j)
            for (int k = 0; k < nc; ++k) {
                g.at(j, k) = -normal.at(j, k);
                if (j == k) g.at(j, k) += t2 * gram_src[size_t(j)].to_rat();
            }
        return is_positive_semidefinite(std::move(g));
    };

    // Start from the exact trace bound: lambda_max <= trace(D^{-1} N).
    Rat tr = 0;
    for (int j = 0; j < nc; ++j) tr += normal.at(j, j) / gram_src[size_t(j)].to_rat();
    Rat hi2 = tr + 1;
    Rat lo2 = 0;
    if (dominated(Rat(0))) return 0.0;
    for (int it = 0; it < 200; ++it) {
        double lo = rat_double(lo2), hi = rat_double(hi2);
        if (hi - lo <= rel_tol * std::max(1.0, hi)) break;
        Rat mid = (lo2 + hi2) / 2;
        if (dominated(mid))
            hi2 = mid;
        else
            lo2 = mid;
    }
    return std::sqrt(rat_double(hi2));
}

namespace {

struct AtomKernel {
    std::vector<double> mass;                 // atom masses
    std::vector<std::vector<double>> k;       // kernel values K(s,t)
    std::vector<std::vector<Rat>> k_exact;    // exact kernel values
    std::vector<Rat> mass_exact;
};

AtomKernel build_kernel(const Basis& basis, const DenseMat& m, int position_cap) {
    if (m.rows != basis.dim() || m.cols != basis.dim())
        throw std::invalid_argument("kernel: matrix must be square on the basis");
    AtomTable table = basis_atom_table(basis, position_cap);
    size_t na = table.patterns.size();
    int dim = basis.dim();
    // B = M D^{-1}; K(s,t) = b(s)^T B b(t).
    DenseMat B = m;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) B.at(i, j) /= basis.gram[size_t(j)].to_rat();
    AtomKernel ker;
    ker.mass.resize(na);
    ker.mass_exact.resize(na);
    for (size_t a = 0; a < na; ++a) {
        ker.mass_exact[a] = Dyadic(table.counts[a], table.positions).to_rat();
        ker.mass[a] = rat_double(ker.mass_exact[a]);
    }
    // u_t = B b(t) per atom, then K(s,t) = <b(s), u_t> over coordinates.
    std::vector<std::vector<Rat>> u(na, std::vector<Rat>(size_t(dim), Rat(0)));
    for (size_t t = 0; t < na; ++t)
        for (int j = 0; j < dim; ++j) {
            int v = table.patterns[t][size_t(j)];
            if (v == 0) continue;
            for (int i = 0; i < dim; ++i) {
                const Rat& w = B.at(i, j);
                if (sgn(w) == 0) continue;
                if (v > 0)
                    u[t][size_t(i)] += w;
                else
                    u[t][size_t(i)] -= w;
            }
        }
    ker.k_exact.assign(na, std::vector<Rat>(na, Rat(0)));
    ker.k.assign(na, std::vector<double>(na, 0.0));
    for (size_t s = 0; s < na; ++s)
        for (size_t t = 0; t < na; ++t) {
            Rat v = 0;
            for (int i = 0; i < dim; ++i) {
                int bs = table.patterns[s][size_t(i)];
                if (bs == 0) continue;
                if (bs > 0)
                    v += u[t][size_t(i)];
                else
                    v -= u[t][size_t(i)];
            }
            ker.k_exact[s][t] = v;
            ker.k[s][t] = rat_double(v);
        }
    return ker;
}

}  // namespace

double kernel_interpolation_upper(const Basis& basis, const DenseMat& m, double p,
                                  int position_cap) {
    AtomKernel ker = build_kernel(basis, m, position_cap);
    size_t na = ker.mass.size();
    // ||K||_{L1->L1} = sup_t sum_s mass_s |K(s,t)|; ||K||_{Linf->Linf} dual.
    Rat n1 = 0, ninf = 0;
    for (size_t t = 0; t < na; ++t) {
        Rat c = 0;
        for (size_t s = 0; s < na; ++s) c += ker.mass_exact[s] * rat_abs(ker.k_exact[s][t]);
        n1 = std::max(n1, c);
    }
    for (size_t s = 0; s < na; ++s) {
        Rat c = 0;
        for (size_t t = 0; t < na; ++t) c += ker.mass_exact[t] * rat_abs(ker.k_exact[s][t]);
        ninf = std::max(ninf, c);
    }
    double q = p / (p - 1.0);
    return std::pow(rat_double(n1), 1.0 / p) * std::pow(rat_double(ninf), 1.0 / q);
}

double duality_ascent_lower(const Basis& basis, const DenseMat& m, double p, int position_cap,
                            int iters) {
    AtomKernel ker = build_kernel(basis, m, position_cap);
    size_t na = ker.mass.size();
    if (na == 0) return 0;
    double q = p / (p - 1.0);
    auto norm_p = [&](const std::vector<double>& f, double e) {
        double s = 0;
        for (size_t i = 0; i < na; ++i) s += ker.mass[i] * std::pow(std::fabs(f[i]), e);
        return std::pow(s, 1.0 / e);
    };
    double best = 0;
    std::mt19937_64 rng(98765);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int start = 0; start < 3; ++start) {
        std::vector<double> f(na);
        for (auto& v : f) v = unif(rng);
        for (int it = 0; it < iters; ++it) {
            double fp = norm_p(f, p);
            if (fp == 0) break;
            for (auto& v : f) v /= fp;
            std::vector<double> g(na, 0.0);
            for (size_t s = 0; s < na; ++s) {
                double acc = 0;
                for (size_t t = 0; t < na; ++t) acc += ker.mass[t] * ker.k[s][t] * f[t];
                g[s] = acc;
            }
            best = std::max(best, norm_p(g, p));
            // Dual ascent: f <- Psi_q(K^T Psi_p(g)).
            std::vector<double> h(na, 0.0);
            for (size_t t = 0; t < na; ++t) {
                double acc = 0;
                for (size_t s = 0; s < na; ++s) {
                    double gs = g[s];
                    double psig = std::copysign(std::pow(std::fabs(gs), p - 1.0), gs);
                    acc += ker.mass[s] * ker.k[s][t] * psig;
                }
                h[t] = std::copysign(std::pow(std::fabs(acc), q - 1.0), acc);
            }
            f = std::move(h);
        }
    }
    return best;
}

NormBounds operator_norm_bounds(const Basis& basis, const DenseMat& m, double p,
                                int position_cap) {
    if (p <= 1.0) throw std::invalid_argument("operator_norm_bounds: requires p > 1");
    NormBounds nb;
    if (p == 2.0) {
        nb.lower = l2_power_lower(m, basis.gram, basis.gram);
        nb.upper = l2_certified_upper(m, basis.gram, basis.gram);
        return nb;
    }
    nb.lower = duality_ascent_lower(basis, m, p, position_cap);
    nb.upper = kernel_interpolation_upper(basis, m, p, position_cap);
    return nb;
}

}  // namespace brs
