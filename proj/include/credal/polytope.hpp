#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "credal/errors.hpp"
#include "credal/simplex.hpp"

namespace credal {

using Vec = std::vector<double>;

namespace detail {

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double max_abs(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

inline void scale_to_unit(Vec& a) {
    double m = max_abs(a);
    if (m > 0.0)
        for (double& x : a) x /= m;
}

class Bits {
public:
    explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
    void set(std::size_t i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return w_[i / 64] >> (i % 64) & 1; }
    Bits operator&(const Bits& o) const {
        Bits r = *this;
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] &= o.w_[i];
        return r;
    }
    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

private:
    std::vector<std::uint64_t> w_;
};

// Indices of a maximal linearly independent subset of rows, greedily in order.
inline std::vector<std::size_t> independent_rows(const std::vector<Vec>& rows, std::size_t d) {
    std::vector<Vec> basis;  // reduced echelon copies
    std::vector<std::size_t> lead;
    std::vector<std::size_t> picked;
    for (std::size_t r = 0; r < rows.size() && picked.size() < d; ++r) {
        Vec v = rows[r];
        for (std::size_t b = 0; b < basis.size(); ++b) {
            double f = v[lead[b]];
            if (f != 0.0)
                for (std::size_t k = 0; k < d; ++k) v[k] -= f * basis[b][k];
        }
        std::size_t p = 0;
        for (std::size_t k = 1; k < d; ++k)
            if (std::fabs(v[k]) > std::fabs(v[p])) p = k;
        if (std::fabs(v[p]) <= 1e-10 * std::max(1.0, max_abs(rows[r]))) continue;
        double inv = 1.0 / v[p];
        for (double& x : v) x *= inv;
        for (auto& bv : basis) {
            double f = bv[p];
            if (f != 0.0)
                for (std::size_t k = 0; k < d; ++k) bv[k] -= f * v[k];
        }
        basis.push_back(std::move(v));
        lead.push_back(p);
        picked.push_back(r);
    }
    return picked;
}

// Inverse of a small dense square matrix (Gauss-Jordan, partial pivoting).
inline std::vector<Vec> invert(std::vector<Vec> a) {
    const std::size_t n = a.size();
    std::vector<Vec> inv(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[best][c])) best = r;
        if (std::fabs(a[best][c]) < 1e-14) throw ModelError("singular matrix in cone construction");
        std::swap(a[best], a[c]);
        std::swap(inv[best], inv[c]);
        double p = 1.0 / a[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] *= p;
            inv[c][k] *= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) continue;
            double f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

} // namespace detail

/// Extreme rays of the pointed cone {y : row·y >= 0 for every row}.
/// The rows must span the whole space (full column rank).
/// Double description with the combinatorial adjacency test.
inline std::vector<Vec> extreme_rays(std::vector<Vec> rows, std::size_t d, std::size_t max_rays = 20000) {
    using detail::Bits;
    for (auto& r : rows) {
        if (r.size() != d) throw InputError("row width differs from dimension");
        detail::scale_to_unit(r);
    }
    const std::size_t m = rows.size();
    auto init = detail::independent_rows(rows, d);
    if (init.size() < d) throw ModelError("cone is not pointed");

    struct Ray {
        Vec y;
        Bits zero;
    };
    std::vector<Ray> rays;
    {
        std::vector<Vec> m0;
        for (auto i : init) m0.push_back(rows[i]);
        auto inv = detail::invert(m0);
        for (std::size_t j = 0; j < d; ++j) {
            Ray r{Vec(d), Bits(m)};
            for (std::size_t k = 0; k < d; ++k) r.y[k] = inv[k][j];
            detail::scale_to_unit(r.y);
            for (std::size_t i = 0; i < d; ++i)
                if (i != j) r.zero.set(init[i]);
            rays.push_back(std::move(r));
        }
    }
    std::vector<bool> used(m, false);
    for (auto i : init) used[i] = true;
    const double eps = 1e-9;
    for (;;) {
        // Next row: the one creating the fewest candidate pairs. Keeps the
        // intermediate cones small compared with input order.
        std::size_t row = m, best_pairs = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            std::size_t np = 0, nn = 0;
            for (auto& r : rays) {
                double v = detail::dot(rows[i], r.y);
                np += v > eps;
                nn += v < -eps;
            }
            if (row == m || np * nn < best_pairs) row = i, best_pairs = np * nn;
        }
        if (row == m) break;
        used[row] = true;
        const Vec& a = rows[row];
        std::vector<double> val(rays.size());
        std::vector<std::size_t> pos, neg, zer;
        for (std::size_t k = 0; k < rays.size(); ++k) {
            val[k] = detail::dot(a, rays[k].y);
            if (val[k] > eps) pos.push_back(k);
            else if (val[k] < -eps) neg.push_back(k);
            else zer.push_back(k);
        }
        if (neg.empty()) {
            for (auto k : zer) rays[k].zero.set(row);
            continue;
        }
        std::vector<Ray> next;
        for (auto k : pos) next.push_back(rays[k]);
        for (auto k : zer) {
            next.push_back(rays[k]);
            next.back().zero.set(row);
        }
        for (auto p : pos)
            for (auto q : neg) {
                Bits common = rays[p].zero & rays[q].zero;
                if (common.count() + 2 < d) continue;
                bool adjacent = true;
                for (std::size_t k = 0; k < rays.size() && adjacent; ++k)
                    if (k != p && k != q && common.subset_of(rays[k].zero)) adjacent = false;
                if (!adjacent) continue;
                Ray r{Vec(d), common};
                for (std::size_t t = 0; t < d; ++t)
                    r.y[t] = val[p] * rays[q].y[t] - val[q] * rays[p].y[t];
                detail::scale_to_unit(r.y);
                r.zero.set(row);
                next.push_back(std::move(r));
            }
        rays = std::move(next);
        if (rays.size() > max_rays) throw CapabilityError("vertex enumeration produced too many rays");
    }
    std::vector<Vec> out;
    out.reserve(rays.size());
    for (auto& r : rays) out.push_back(std::move(r.y));
    return out;
}

/// Drops points within `radius` (max-norm) of an earlier point.
inline std::vector<Vec> deduplicate(const std::vector<Vec>& pts, double radius = 1e-6) {
    std::vector<Vec> out;
    for (auto& p : pts) {
        bool dup = false;
        for (auto& q : out) {
            double d = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) d = std::max(d, std::fabs(p[i] - q[i]));
            if (d < radius) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(p);
    }
    return out;
}

/// Vertices of {p : p >= 0, Σp = 1, γ·p >= 0 for each γ}. Empty when infeasible.
inline std::vector<Vec> simplex_section_vertices(const std::vector<Vec>& gammas, std::size_t k,
                                                std::size_t max_rays = 20000) {
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < k; ++i) {
        Vec e(k, 0.0);
        e[i] = 1.0;
        rows.push_back(std::move(e));
    }
    for (auto& g : gammas) rows.push_back(g);
    auto rays = extreme_rays(std::move(rows), k, max_rays);
    std::vector<Vec> out;
    for (auto& r : rays) {
        double s = 0.0;
        for (double x : r) s += x;
        if (s <= 0.0) continue;
        for (double& x : r) {
            x /= s;
            if (std::fabs(x) < 1e-13) x = 0.0;
        }
        out.push_back(r);
    }
    return deduplicate(out);
}

/// Homogeneous inequalities γ·p >= 0 whose solutions with Σp = 1 are exactly
/// conv(points). All points must sum to one.
inline std::vector<Vec> facets_of_hull(const std::vector<Vec>& points, std::size_t k) {
    if (points.empty()) throw ModelError("hull of no points");
    // Orthonormal basis of span(points), then of its complement.
    std::vector<Vec> basis;
    auto reduce = [&](Vec v) {
        for (int pass = 0; pass < 2; ++pass)
            for (auto& b : basis) {
                double f = detail::dot(v, b);
                for (std::size_t i = 0; i < k; ++i) v[i] -= f * b[i];
            }
        return v;
    };
    for (auto& p : points) {
        Vec v = reduce(p);
        double n = std::sqrt(detail::dot(v, v));
        if (n > 1e-9) {
            for (double& x : v) x /= n;
            basis.push_back(std::move(v));
        }
    }
    const std::size_t r = basis.size();
    std::vector<Vec> lineality;
    for (std::size_t i = 0; i < k && basis.size() < k; ++i) {
        Vec e(k, 0.0);
        e[i] = 1.0;
        Vec v = reduce(e);
        double n = std::sqrt(detail::dot(v, v));
        if (n > 1e-6) {
            for (double& x : v) x /= n;
            basis.push_back(v);
            lineality.push_back(std::move(v));
        }
    }
    std::vector<Vec> rows;
    for (auto& p : points) {
        Vec row(r);
        for (std::size_t j = 0; j < r; ++j) row[j] = detail::dot(p, basis[j]);
        rows.push_back(std::move(row));
    }
    auto rays = extreme_rays(std::move(rows), r);
    std::vector<Vec> out;
    for (auto& y : rays) {
        Vec g(k, 0.0);
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t i = 0; i < k; ++i) g[i] += y[j] * basis[j][i];
        out.push_back(std::move(g));
    }
    for (auto& l : lineality) {
        out.push_back(l);
        Vec neg = l;
        for (double& x : neg) x = -x;
        out.push_back(std::move(neg));
    }
    for (auto& g : out) {
        detail::scale_to_unit(g);
        for (double& x : g)
            if (std::fabs(x) < 1e-12) x = 0.0;
    }
    return out;
}

/// LP test: is p a convex combination of `points` (within tolerance)?
inline bool in_convex_hull(const Vec& p, const std::vector<Vec>& points, double tol = 1e-7) {
    if (points.empty()) return false;
    const std::size_t k = p.size();
    LinearProgram lp;
    // Variables: λ_j >= 0 and an elastic slack pair per coordinate.
    const std::size_t q = points.size();
    lp.num_vars = q + 2 * k;
    lp.nonnegative = true;
    lp.objective.assign(lp.num_vars, 0.0);
    for (std::size_t i = 0; i < 2 * k; ++i) lp.objective[q + i] = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        Vec row(lp.num_vars, 0.0);
        for (std::size_t j = 0; j < q; ++j) row[j] = points[j][i];
        row[q + 2 * i] = 1.0;
        row[q + 2 * i + 1] = -1.0;
        lp.add_eq(std::move(row), p[i]);
    }
    Vec norm(lp.num_vars, 0.0);
    for (std::size_t j = 0; j < q; ++j) norm[j] = 1.0;
    lp.add_eq(std::move(norm), 1.0);
    auto sol = solve(lp);
    return sol.status == LpStatus::optimal && sol.optimum <= tol;
}

} // namespace credal
