#pragma once

// Exact-rational solving of the global program, for adjudicating borderline
// floating-point results. Requires linking gmpxx and gmp.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "credal/global_lp.hpp"
#include "credal/simplex.hpp"

namespace credal {

template <>
struct ScalarTraits<mpq_class> {
    static mpq_class zero_tol() { return 0; }
    static mpq_class pivot_tol() { return 0; }
    static mpq_class feas_tol() { return 0; }
    static mpq_class abs(const mpq_class& x) { return ::abs(x); }
    static constexpr bool exact = true;
    static constexpr std::size_t refactor_every = 0;
};

inline constexpr std::size_t max_exact_joint_states = 256;

namespace detail {

// Nearest fraction with denominator at most 2^20 when it matches x to within
// a few ulps, else the exact binary value. Undoes rounding from row scaling.
inline mpq_class snap_rational(double x) {
    mpq_class exact(x);
    double a = std::fabs(x);
    if (a == 0.0 || a > 1e9) return exact;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = a;
    for (int it = 0; it < 40; ++it) {
        double fl = std::floor(r);
        long long k = static_cast<long long>(fl);
        long long p2 = k * p1 + p0, q2 = k * q1 + q0;
        if (q2 > (1LL << 20)) break;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
        if (std::fabs(static_cast<double>(p1) / q1 - a) <= 8 * std::numeric_limits<double>::epsilon() * a) {
            mpq_class out(static_cast<double>(p1));
            out /= static_cast<double>(q1);
            out.canonicalize();
            return x < 0 ? mpq_class(-out) : out;
        }
        if (r - fl == 0.0) break;
        r = 1.0 / (r - fl);
    }
    return exact;
}

} // namespace detail

/// Exact optimum of the global program. Each constraint row is rescaled so its
/// largest coefficient is 1, then coefficients are snapped to small fractions.
inline mpq_class lower_expectation_exact(const CredalNetwork& net, const Factor& f,
                                         bool include_nonnegativity = false) {
    if (net.joint_size(net.dag().all()) > max_exact_joint_states)
        throw CapabilityError("exact mode is limited to 256 joint states");
    auto lp = build_global_lp(net, f, include_nonnegativity);
    BasicLinearProgram<mpq_class> q;
    q.num_vars = lp.num_vars;
    q.nonnegative = lp.nonnegative;
    auto conv = [](const std::vector<double>& v, double scale) {
        std::vector<mpq_class> out;
        out.reserve(v.size());
        for (double x : v) out.push_back(detail::snap_rational(x / scale));
        return out;
    };
    auto row_scale = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::fabs(x));
        return m > 0.0 ? m : 1.0;
    };
    q.objective = conv(lp.objective, 1.0);
    for (auto& r : lp.ge) {
        double s = row_scale(r.coef);
        q.add_ge(conv(r.coef, s), detail::snap_rational(r.bound / s));
    }
    for (auto& r : lp.eq) {
        double s = row_scale(r.coef);
        q.add_eq(conv(r.coef, s), detail::snap_rational(r.bound / s));
    }
    auto sol = solve(q);
    if (sol.status != LpStatus::optimal) throw ModelError("global program has no optimum");
    return sol.optimum;
}

} // namespace credal
