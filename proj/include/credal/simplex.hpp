#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "credal/errors.hpp"

namespace credal {

template <class Scalar>
struct ScalarTraits {
    static Scalar zero_tol() { return Scalar(1e-11); }
    static Scalar pivot_tol() { return Scalar(1e-9); }
    static Scalar feas_tol() { return Scalar(1e-7); }
    static Scalar abs(const Scalar& x) { return x < Scalar(0) ? Scalar(-x) : x; }
    static constexpr bool exact = false;
    static constexpr std::size_t refactor_every = 64;
};

enum class LpStatus { optimal, infeasible, unbounded, capability_exceeded };

inline const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::capability_exceeded: return "capability-exceeded";
    }
    return "?";
}

/// minimize objective·x subject to ge rows (a·x >= b) and eq rows (a·x = b).
/// Variables are free unless `nonnegative` is set.
template <class Scalar>
struct BasicLinearProgram {
    struct Row {
        std::vector<Scalar> coef;
        Scalar bound{};
        std::string label;
    };

    std::size_t num_vars = 0;
    std::vector<std::string> variable_names;
    std::vector<Scalar> objective;
    std::vector<Row> ge;
    std::vector<Row> eq;
    bool nonnegative = false;

    void add_ge(std::vector<Scalar> coef, Scalar bound, std::string label = {}) {
        ge.push_back({std::move(coef), std::move(bound), std::move(label)});
    }
    void add_eq(std::vector<Scalar> coef, Scalar bound, std::string label = {}) {
        eq.push_back({std::move(coef), std::move(bound), std::move(label)});
    }
};

template <class Scalar>
struct BasicLpSolution {
    LpStatus status = LpStatus::infeasible;
    Scalar optimum{};
    std::vector<Scalar> argmin;
    /// Multipliers of the ge rows then the eq rows; ge multipliers are >= 0.
    std::vector<Scalar> duals;
    std::size_t iterations = 0;
};

using LinearProgram = BasicLinearProgram<double>;
using LpSolution = BasicLpSolution<double>;

namespace detail {

// Revised simplex on  min c·x, A x = b, x >= 0, b >= 0, starting from an
// all-artificial basis. Columns are stored sparse; the basis inverse dense.
// Dantzig pricing, falling back to Bland's rule on long degenerate runs.
template <class Scalar>
class RevisedSimplex {
    using T = ScalarTraits<Scalar>;

public:
    struct Entry {
        std::size_t row;
        Scalar value;
    };

    RevisedSimplex(std::size_t rows, std::vector<std::vector<Entry>> cols, std::vector<Scalar> cost,
                   std::vector<Scalar> rhs)
        : m_(rows), n_(cols.size()), cols_(std::move(cols)), cost_(std::move(cost)), b_(std::move(rhs)) {
        for (std::size_t i = 0; i < m_; ++i) cols_.push_back({Entry{i, Scalar(1)}});
        basis_.resize(m_);
        pos_.assign(n_ + m_, npos);
        for (std::size_t i = 0; i < m_; ++i) {
            basis_[i] = n_ + i;
            pos_[n_ + i] = i;
        }
        binv_.assign(m_ * m_, Scalar(0));
        for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = Scalar(1);
        xb_ = b_;
        refactor_every_ = T::refactor_every == 0 ? 0 : std::max<std::size_t>(T::refactor_every, m_);
    }

    LpStatus run() {
        // Phase 1: minimise the sum of artificials.
        std::vector<Scalar> c1(n_ + m_, Scalar(0));
        for (std::size_t i = 0; i < m_; ++i) c1[n_ + i] = Scalar(1);
        auto st = iterate(c1, true);
        if (st != LpStatus::optimal) return LpStatus::infeasible;
        Scalar infeas(0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_) infeas += xb_[i];
        Scalar scale(1);
        for (auto& v : b_) scale = scale < T::abs(v) ? T::abs(v) : scale;
        if (infeas > T::feas_tol() * scale) return LpStatus::infeasible;
        drive_out_artificials();
        phase2_cost_.assign(n_ + m_, Scalar(0));
        for (std::size_t j = 0; j < n_; ++j) phase2_cost_[j] = cost_[j];
        if constexpr (T::exact) {
            return iterate(phase2_cost_, false);
        } else {
            // Harris steps leave small negative basic values behind; recompute
            // them and repair with dual simplex steps from the optimal basis.
            auto st2 = iterate(phase2_cost_, false);
            if (st2 != LpStatus::optimal) return st2;
            recompute_xb();
            return dual_cleanup(phase2_cost_);
        }
    }

    std::vector<Scalar> solution() const {
        std::vector<Scalar> x(n_, Scalar(0));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = xb_[i];
        return x;
    }

    /// Simplex multipliers c_B B^{-1} for the phase-2 costs.
    std::vector<Scalar> duals() const {
        std::vector<Scalar> y(m_);
        multipliers(phase2_cost_, y);
        return y;
    }

    std::size_t iterations() const { return iterations_; }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    void multipliers(const std::vector<Scalar>& c, std::vector<Scalar>& y) const {
        for (std::size_t k = 0; k < m_; ++k) y[k] = Scalar(0);
        for (std::size_t i = 0; i < m_; ++i) {
            const Scalar& cb = c[basis_[i]];
            if (cb == Scalar(0)) continue;
            const Scalar* row = &binv_[i * m_];
            for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
        }
    }

    std::vector<Scalar> column(std::size_t j) const {
        std::vector<Scalar> u(m_, Scalar(0));
        for (auto& e : cols_[j])
            for (std::size_t i = 0; i < m_; ++i) u[i] += binv_[i * m_ + e.row] * e.value;
        return u;
    }

    void pivot(std::size_t r, std::size_t entering, const std::vector<Scalar>& u) {
        Scalar theta = xb_[r] / u[r];
        for (std::size_t i = 0; i < m_; ++i)
            if (i != r) xb_[i] -= theta * u[i];
        xb_[r] = theta;
        Scalar inv = Scalar(1) / u[r];
        Scalar* rowr = &binv_[r * m_];
        for (std::size_t k = 0; k < m_; ++k) rowr[k] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || u[i] == Scalar(0)) continue;
            Scalar f = u[i];
            Scalar* rowi = &binv_[i * m_];
            for (std::size_t k = 0; k < m_; ++k) rowi[k] -= f * rowr[k];
        }
        pos_[basis_[r]] = npos;
        basis_[r] = entering;
        pos_[entering] = r;
        if (refactor_every_ != 0 && ++since_refactor_ >= refactor_every_) refactor();
    }

    // Rebuilds the basis inverse from scratch to shed accumulated rounding.
    void refactor() {
        since_refactor_ = 0;
        std::vector<Scalar> a(m_ * m_, Scalar(0));
        for (std::size_t k = 0; k < m_; ++k)
            for (auto& e : cols_[basis_[k]]) a[e.row * m_ + k] = e.value;
        std::vector<Scalar> inv(m_ * m_, Scalar(0));
        for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = Scalar(1);
        for (std::size_t c = 0; c < m_; ++c) {
            std::size_t best = c;
            for (std::size_t r = c + 1; r < m_; ++r)
                if (T::abs(a[r * m_ + c]) > T::abs(a[best * m_ + c])) best = r;
            if (T::abs(a[best * m_ + c]) < Scalar(1e-14)) return;  // keep the product form
            if (best != c)
                for (std::size_t k = 0; k < m_; ++k) {
                    std::swap(a[best * m_ + k], a[c * m_ + k]);
                    std::swap(inv[best * m_ + k], inv[c * m_ + k]);
                }
            Scalar p = Scalar(1) / a[c * m_ + c];
            for (std::size_t k = 0; k < m_; ++k) {
                a[c * m_ + k] *= p;
                inv[c * m_ + k] *= p;
            }
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == c) continue;
                Scalar f = a[r * m_ + c];
                if (f == Scalar(0)) continue;
                for (std::size_t k = 0; k < m_; ++k) {
                    a[r * m_ + k] -= f * a[c * m_ + k];
                    inv[r * m_ + k] -= f * inv[c * m_ + k];
                }
            }
        }
        binv_ = std::move(inv);
        for (std::size_t i = 0; i < m_; ++i) {
            Scalar s(0);
            for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * b_[k];
            xb_[i] = s;
        }
    }

    void recompute_xb() {
        for (std::size_t i = 0; i < m_; ++i) {
            Scalar s(0);
            for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * b_[k];
            xb_[i] = s;
        }
    }

    // Dual simplex from a dual-feasible basis until xb >= 0, with a Harris
    // style ratio test on the reduced costs.
    LpStatus dual_cleanup(const std::vector<Scalar>& c) {
        std::vector<Scalar> y(m_), alpha(n_), d(n_);
        const Scalar tol = Scalar(1e-10);
        for (std::size_t guard = 0;; ++guard) {
            if (guard > 10 * (m_ + 10)) throw ConvergenceError("dual simplex cleanup did not converge");
            std::size_t r = npos;
            for (std::size_t i = 0; i < m_; ++i)
                if (xb_[i] < -tol && (r == npos || xb_[i] < xb_[r])) r = i;
            if (r == npos) break;
            multipliers(c, y);
            const Scalar* rowr = &binv_[r * m_];
            Scalar amax(0);
            for (std::size_t j = 0; j < n_; ++j) {
                alpha[j] = Scalar(0);
                if (pos_[j] != npos) continue;
                Scalar dj = c[j];
                for (auto& e : cols_[j]) {
                    alpha[j] += rowr[e.row] * e.value;
                    dj -= y[e.row] * e.value;
                }
                d[j] = std::max(dj, Scalar(0));
                amax = std::max(amax, -alpha[j]);
            }
            const Scalar athresh = std::max(T::pivot_tol(), Scalar(1e-7) * amax);
            Scalar bound(0);
            bool any = false;
            for (std::size_t j = 0; j < n_; ++j) {
                if (pos_[j] != npos || !(-alpha[j] > athresh)) continue;
                Scalar q = (d[j] + T::zero_tol()) / -alpha[j];
                if (!any || q < bound) bound = q;
                any = true;
            }
            if (!any) {
                if (xb_[r] < -T::feas_tol()) return LpStatus::infeasible;
                xb_[r] = Scalar(0);
                continue;
            }
            std::size_t entering = npos;
            for (std::size_t j = 0; j < n_; ++j) {
                if (pos_[j] != npos || !(-alpha[j] > athresh)) continue;
                if (d[j] / -alpha[j] <= bound && (entering == npos || -alpha[j] > -alpha[entering])) entering = j;
            }
            ++iterations_;
            pivot(r, entering, column(entering));
        }
        for (auto& v : xb_)
            if (v < Scalar(0)) v = Scalar(0);
        return LpStatus::optimal;
    }

    LpStatus iterate(const std::vector<Scalar>& c, bool phase1) {
        std::vector<Scalar> y(m_);
        std::vector<char> rejected(n_ + m_, 0);
        std::size_t degenerate = 0;
        const std::size_t limit = phase1 ? n_ + m_ : n_;
        for (;;) {
            if (++iterations_ > 200000) throw ConvergenceError("simplex iteration limit reached");
            if (phase1 && artificial_sum() <= T::zero_tol()) return LpStatus::optimal;
            multipliers(c, y);
            const bool bland = degenerate > 50;
            std::size_t entering = npos;
            Scalar best_d(0);
            for (std::size_t j = 0; j < limit; ++j) {
                if (pos_[j] != npos || rejected[j]) continue;
                Scalar d = c[j];
                for (auto& e : cols_[j]) d -= y[e.row] * e.value;
                if (d < -T::zero_tol() && (entering == npos || d < best_d)) {
                    entering = j;
                    best_d = d;
                    if (bland) break;
                }
            }
            if (entering == npos) return LpStatus::optimal;
            auto u = column(entering);
            std::size_t leave = npos;
            Scalar best_ratio(0);
            bool positive = false;
            for (std::size_t i = 0; i < m_; ++i)
                if (u[i] > T::zero_tol()) positive = true;
            if (!phase1) {
                // An artificial still basic sits on a redundant row; drop it.
                for (std::size_t i = 0; i < m_ && leave == npos; ++i)
                    if (basis_[i] >= n_ && T::abs(u[i]) > T::pivot_tol()) leave = i;
            }
            if (leave == npos) {
                if constexpr (T::exact) {
                    for (std::size_t i = 0; i < m_; ++i) {
                        if (!(u[i] > Scalar(0))) continue;
                        Scalar ratio = xb_[i] / u[i];
                        if (leave == npos || ratio < best_ratio ||
                            (ratio == best_ratio && basis_[i] < basis_[leave])) {
                            leave = i;
                            best_ratio = ratio;
                        }
                    }
                } else {
                    // Harris: bound the step with a small feasibility slack,
                    // then take the largest pivot within that bound.
                    const Scalar slack = Scalar(1e-9);
                    Scalar bound(0);
                    bool any = false;
                    for (std::size_t i = 0; i < m_; ++i) {
                        if (!(u[i] > T::pivot_tol())) continue;
                        Scalar r = (std::max(xb_[i], Scalar(0)) + slack) / u[i];
                        if (!any || r < bound) bound = r;
                        any = true;
                    }
                    for (std::size_t i = 0; i < m_; ++i) {
                        if (!(u[i] > T::pivot_tol())) continue;
                        Scalar r = std::max(xb_[i], Scalar(0)) / u[i];
                        if (r <= bound && (leave == npos || u[i] > u[leave])) {
                            leave = i;
                            best_ratio = r;
                        }
                    }
                }
            }
            if (leave == npos) {
                // Phase 1 is bounded below, and a column with tiny positive
                // entries only signals rounding noise in its reduced cost.
                if (!phase1 && !positive) return LpStatus::unbounded;
                rejected[entering] = 1;
                continue;
            }
            if (!phase1 && basis_[leave] >= n_) xb_[leave] = Scalar(0);
            if (xb_[leave] < Scalar(0)) xb_[leave] = Scalar(0);
            if (best_ratio == Scalar(0)) ++degenerate;
            else degenerate = 0;
            pivot(leave, entering, u);
            std::fill(rejected.begin(), rejected.end(), 0);
        }
    }

    Scalar artificial_sum() const {
        Scalar s(0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_) s += xb_[i];
        return s;
    }

    void drive_out_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) continue;
            xb_[r] = Scalar(0);
            for (std::size_t j = 0; j < n_; ++j) {
                if (pos_[j] != npos) continue;
                Scalar alpha(0);
                for (auto& e : cols_[j]) alpha += binv_[r * m_ + e.row] * e.value;
                if (T::abs(alpha) > T::pivot_tol()) {
                    pivot(r, j, column(j));
                    break;
                }
            }
        }
    }

    std::size_t m_, n_;
    std::vector<std::vector<Entry>> cols_;
    std::vector<Scalar> cost_;
    std::vector<Scalar> phase2_cost_;
    std::vector<Scalar> b_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> pos_;
    std::vector<Scalar> binv_;
    std::vector<Scalar> xb_;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
    std::size_t refactor_every_ = 0;
};

} // namespace detail

template <class Scalar>
BasicLpSolution<Scalar> solve(const BasicLinearProgram<Scalar>& lp) {
    using Entry = typename detail::RevisedSimplex<Scalar>::Entry;
    const std::size_t n = lp.num_vars;
    if (lp.objective.size() != n) throw InputError("objective width differs from variable count");
    const std::size_t m = lp.ge.size() + lp.eq.size();
    // Standard-form columns: x+ (and x- when free), then one surplus per ge row.
    const std::size_t split = lp.nonnegative ? n : 2 * n;
    std::vector<std::vector<Entry>> cols(split + lp.ge.size());
    std::vector<Scalar> cost(cols.size(), Scalar(0));
    std::vector<Scalar> rhs(m);
    std::vector<Scalar> sign(m, Scalar(1));
    for (std::size_t j = 0; j < n; ++j) {
        cost[j] = lp.objective[j];
        if (!lp.nonnegative) cost[n + j] = -lp.objective[j];
    }
    std::size_t r = 0;
    auto add_row = [&](const typename BasicLinearProgram<Scalar>::Row& row, bool is_ge) {
        if (row.coef.size() != n) throw InputError("row width differs from variable count");
        if (row.bound < Scalar(0)) sign[r] = Scalar(-1);
        rhs[r] = sign[r] * row.bound;
        for (std::size_t j = 0; j < n; ++j) {
            if (row.coef[j] == Scalar(0)) continue;
            Scalar v = sign[r] * row.coef[j];
            cols[j].push_back({r, v});
            if (!lp.nonnegative) cols[n + j].push_back({r, Scalar(-v)});
        }
        if (is_ge) cols[split + r].push_back({r, Scalar(-sign[r])});
        ++r;
    };
    for (auto& row : lp.ge) add_row(row, true);
    for (auto& row : lp.eq) add_row(row, false);

    detail::RevisedSimplex<Scalar> simplex(m, std::move(cols), std::move(cost), std::move(rhs));
    BasicLpSolution<Scalar> out;
    out.status = simplex.run();
    out.iterations = simplex.iterations();
    if (out.status != LpStatus::optimal) return out;
    auto x = simplex.solution();
    out.argmin.assign(n, Scalar(0));
    for (std::size_t j = 0; j < n; ++j) out.argmin[j] = lp.nonnegative ? x[j] : Scalar(x[j] - x[n + j]);
    out.optimum = Scalar(0);
    for (std::size_t j = 0; j < n; ++j) out.optimum += lp.objective[j] * out.argmin[j];
    auto y = simplex.duals();
    out.duals.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.duals[i] = sign[i] * y[i];
    return out;
}

/// Same program solved through its dual, whose basis has one row per primal
/// variable. Pays off when there are many more rows than variables. The
/// primal argmin is read off the dual multipliers.
template <class Scalar>
BasicLpSolution<Scalar> solve_dual(const BasicLinearProgram<Scalar>& lp) {
    const std::size_t n = lp.num_vars;
    if (lp.objective.size() != n) throw InputError("objective width differs from variable count");
    const std::size_t g = lp.ge.size(), e = lp.eq.size();
    // Variables: y (ge multipliers) >= 0, w+ and w- (eq multipliers), and a
    // slack per primal variable when the primal is non-negative.
    BasicLinearProgram<Scalar> d;
    d.nonnegative = true;
    d.num_vars = g + 2 * e + (lp.nonnegative ? n : 0);
    d.objective.assign(d.num_vars, Scalar(0));
    for (std::size_t i = 0; i < g; ++i) d.objective[i] = -lp.ge[i].bound;
    for (std::size_t k = 0; k < e; ++k) {
        d.objective[g + k] = -lp.eq[k].bound;
        d.objective[g + e + k] = lp.eq[k].bound;
    }
    d.eq.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto& row = d.eq[j];
        row.coef.assign(d.num_vars, Scalar(0));
        row.bound = lp.objective[j];
        for (std::size_t i = 0; i < g; ++i) row.coef[i] = lp.ge[i].coef[j];
        for (std::size_t k = 0; k < e; ++k) {
            row.coef[g + k] = lp.eq[k].coef[j];
            row.coef[g + e + k] = -lp.eq[k].coef[j];
        }
        if (lp.nonnegative) row.coef[g + 2 * e + j] = Scalar(1);
    }
    auto ds = solve(d);
    BasicLpSolution<Scalar> out;
    out.iterations = ds.iterations;
    // An infeasible dual means the primal is infeasible or unbounded; the
    // programs built here always have bounded feasible sets.
    if (ds.status == LpStatus::infeasible) out.status = LpStatus::infeasible;
    else if (ds.status == LpStatus::unbounded) out.status = LpStatus::infeasible;
    else out.status = ds.status;
    if (out.status != LpStatus::optimal) return out;
    out.argmin.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.argmin[j] = -ds.duals[j];
    // f·p loses less to the cleanup than the dual objective does.
    out.optimum = Scalar(0);
    for (std::size_t j = 0; j < n; ++j) out.optimum += lp.objective[j] * out.argmin[j];
    out.duals.resize(g + e);
    for (std::size_t i = 0; i < g; ++i) out.duals[i] = ds.argmin[i];
    for (std::size_t k = 0; k < e; ++k) out.duals[g + k] = ds.argmin[g + k] - ds.argmin[g + e + k];
    return out;
}

} // namespace credal
