#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "credal/errors.hpp"
#include "credal/numeric.hpp"

namespace credal {

/// μ ↦ lower expectation of I_B·(f − μ), with the range of f over B.
class RhoEvaluator {
public:
    RhoEvaluator(std::function<double(double)> rho, double min_f, double max_f)
        : rho_(std::move(rho)), min_f_(min_f), max_f_(max_f) {
        if (!(min_f_ <= max_f_)) throw InputError("empty range for the conditioned function");
    }

    double operator()(double mu) const { return rho_(mu); }
    double min_f() const { return min_f_; }
    double max_f() const { return max_f_; }

private:
    std::function<double(double)> rho_;
    double min_f_;
    double max_f_;
};

enum class BracketKind { unique_root, rightmost_root, vacuous_fallback, local_fallback };

inline const char* to_string(BracketKind k) {
    switch (k) {
    case BracketKind::unique_root: return "unique-root";
    case BracketKind::rightmost_root: return "rightmost-root";
    case BracketKind::vacuous_fallback: return "vacuous-fallback";
    case BracketKind::local_fallback: return "local-fallback";
    }
    return "?";
}

struct BracketResult {
    double value = 0.0;
    BracketKind kind = BracketKind::local_fallback;
    std::size_t iterations = 0;
    double width = 0.0;
};

inline constexpr double default_bracket_tolerance = 1e-9;
inline constexpr std::size_t max_bracket_iterations = 200;

inline double rho(const RhoEvaluator& ev, double mu) { return ev(mu); }

inline bool lower_prob_positive(const RhoEvaluator& ev) { return ev(ev.min_f() - 1.0) > tau_sign; }

inline bool upper_prob_positive(const RhoEvaluator& ev) { return ev(ev.max_f() + 1.0) < -tau_sign; }

namespace detail {

// Bisection keeping `lo` on the side classified as ρ >= 0.
template <class RightOf>
BracketResult bisect(const RhoEvaluator& ev, double tol, BracketKind kind, RightOf right_of) {
    if (!(tol > 0.0)) throw InputError("bracketing tolerance must be positive");
    BracketResult r;
    r.kind = kind;
    double lo = ev.min_f(), hi = ev.max_f();
    if (hi - lo <= tol || !right_of(hi, lo)) {
        r.value = hi - lo <= tol ? lo : hi;
        r.width = hi - lo <= tol ? hi - lo : 0.0;
        return r;
    }
    while (hi - lo > tol) {
        if (++r.iterations > max_bracket_iterations)
            throw ConvergenceError("bracketing did not converge in 200 iterations");
        double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        if (right_of(mid, lo)) hi = mid;
        else lo = mid;
    }
    r.value = lo;
    r.width = hi - lo;
    return r;
}

} // namespace detail

/// Root of the strictly decreasing ρ; needs a positive lower probability of B.
inline BracketResult natural_conditional(const RhoEvaluator& ev, double tol = default_bracket_tolerance) {
    if (!lower_prob_positive(ev))
        throw HypothesisError("lower probability of the conditioning event is zero; "
                              "the natural-extension conditional is not computable from rho");
    return detail::bisect(ev, tol, BracketKind::unique_root, [&](double mu, double) { return ev(mu) < 0.0; });
}

/// Regular extension: unique root, rightmost root, or the flagged vacuous bound
/// min_B f when the upper probability of B is zero.
inline BracketResult regular_conditional(const RhoEvaluator& ev, double tol = default_bracket_tolerance) {
    if (lower_prob_positive(ev)) return natural_conditional(ev, tol);
    if (!upper_prob_positive(ev)) {
        BracketResult r;
        r.value = ev.min_f();
        r.kind = BracketKind::vacuous_fallback;
        return r;
    }
    // ρ vanishes up to the rightmost root and decreases after it, possibly very
    // slowly. A slightly negative value counts as "right of the root" only if
    // ρ is visibly larger at a point further left.
    auto right_of = [&](double mu, double lo) {
        double r = ev(mu);
        if (r >= 0.0) return false;
        if (r < -tau_sign) return true;
        double probe = mu - (mu - lo) / 2.0;
        return ev(probe) - r > tau_sign / 2.0;
    };
    return detail::bisect(ev, tol, BracketKind::rightmost_root, right_of);
}

} // namespace credal
