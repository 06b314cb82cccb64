#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "credal/errors.hpp"
#include "credal/numeric.hpp"
#include "credal/polytope.hpp"
#include "credal/simplex.hpp"

namespace credal {

using MassFunction = std::vector<double>;

/// Σ_x α(x) p(x) >= β
struct LinearConstraint {
    std::vector<double> alpha;
    double beta = 0.0;
};

/// Σ_x γ(x) p(x) >= 0
struct HomogeneousConstraint {
    std::vector<double> gamma;
};

inline constexpr std::size_t max_local_states = 12;
inline constexpr std::size_t max_local_vertices = 64;

/// A finitely generated local credal set over `states()` states. Both
/// representations and the homogeneous form are computed on construction.
class CredalSet {
public:
    static CredalSet from_vertices(std::size_t k, std::vector<MassFunction> vertices) {
        check_states(k);
        if (vertices.empty()) throw ModelError("credal set has no vertices");
        for (auto& v : vertices) check_mass(k, v);
        CredalSet m(k);
        m.vertices_given_ = true;
        m.vertices_ = prune(deduplicate(vertices));
        if (m.vertices_.size() > max_local_vertices)
            throw CapabilityError("local credal set has more than 64 vertices");
        m.derive_constraints();
        m.derive_homogeneous();
        return m;
    }

    static CredalSet from_constraints(std::size_t k, std::vector<LinearConstraint> constraints) {
        check_states(k);
        for (auto& c : constraints)
            if (c.alpha.size() != k) throw ModelError("constraint width differs from state count");
        CredalSet m(k);
        m.constraints_given_ = true;
        m.constraints_ = std::move(constraints);
        m.derive_homogeneous();
        std::vector<Vec> gammas;
        for (auto& h : m.homogeneous_) gammas.push_back(h.gamma);
        m.vertices_ = simplex_section_vertices(gammas, k);
        if (m.vertices_.empty()) throw ModelError("credal set is empty");
        if (m.vertices_.size() > max_local_vertices)
            throw CapabilityError("local credal set has more than 64 vertices");
        return m;
    }

    /// Both representations given; they must describe the same polytope.
    static CredalSet from_both(std::size_t k, std::vector<MassFunction> vertices,
                               std::vector<LinearConstraint> constraints) {
        auto a = from_vertices(k, vertices);
        auto b = from_constraints(k, std::move(constraints));
        for (auto& v : a.vertices_)
            if (!b.contains(v)) throw ModelError("vertex list and constraint list disagree");
        for (auto& v : b.vertices_)
            if (!in_convex_hull(v, a.vertices_, tau_feas))
                throw ModelError("vertex list and constraint list disagree");
        b.vertices_given_ = true;
        b.vertices_ = a.vertices_;
        return b;
    }

    static CredalSet singleton(MassFunction p) {
        std::size_t k = p.size();
        return from_vertices(k, {std::move(p)});
    }

    static CredalSet vacuous(std::size_t k) {
        std::vector<MassFunction> v;
        for (std::size_t i = 0; i < k; ++i) {
            MassFunction e(k, 0.0);
            e[i] = 1.0;
            v.push_back(std::move(e));
        }
        return from_vertices(k, std::move(v));
    }

    /// Binary set with p(first state) in [lo, hi].
    static CredalSet interval(double lo, double hi) {
        if (lo == hi) return singleton({lo, 1.0 - lo});
        return from_vertices(2, {{lo, 1.0 - lo}, {hi, 1.0 - hi}});
    }

    std::size_t states() const { return k_; }
    const std::vector<MassFunction>& vertices() const { return vertices_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::vector<HomogeneousConstraint>& homogeneous() const { return homogeneous_; }
    bool vertices_given() const { return vertices_given_; }
    bool constraints_given() const { return constraints_given_; }
    bool is_singleton() const { return vertices_.size() == 1; }

    /// Membership through the constraint representation.
    bool contains(const MassFunction& p, double tol = tau_feas) const {
        if (p.size() != k_) return false;
        double s = 0.0;
        for (double x : p) {
            if (x < -tol) return false;
            s += x;
        }
        if (std::fabs(s - 1.0) > tol) return false;
        for (auto& c : constraints_)
            if (detail::dot(c.alpha, p) < c.beta - tol) return false;
        return true;
    }

private:
    explicit CredalSet(std::size_t k) : k_(k) {}

    static void check_states(std::size_t k) {
        if (k == 0) throw ModelError("credal set over an empty state space");
        if (k > max_local_states) throw CapabilityError("local state space larger than 12");
    }

    static void check_mass(std::size_t k, const MassFunction& p) {
        if (p.size() != k) throw ModelError("mass function width differs from state count");
        double s = 0.0;
        for (double x : p) {
            if (!(x >= -tau_feas)) throw ModelError("negative probability mass");
            s += x;
        }
        if (std::fabs(s - 1.0) > tau_feas) throw ModelError("mass function does not sum to one");
    }

    // Keeps only points outside the hull of the others.
    static std::vector<MassFunction> prune(std::vector<MassFunction> pts) {
        if (pts.size() <= 2) return pts;
        for (std::size_t i = pts.size(); i-- > 0;) {
            std::vector<MassFunction> others;
            for (std::size_t j = 0; j < pts.size(); ++j)
                if (j != i) others.push_back(pts[j]);
            if (in_convex_hull(pts[i], others, 1e-10)) pts = std::move(others);
        }
        return pts;
    }

    void derive_constraints() {
        for (auto& g : facets_of_hull(vertices_, k_)) constraints_.push_back({g, 0.0});
    }

    void derive_homogeneous() {
        homogeneous_.clear();
        for (auto& c : constraints_) {
            HomogeneousConstraint h{c.alpha};
            for (double& x : h.gamma) x -= c.beta;
            homogeneous_.push_back(std::move(h));
        }
        // Non-negativity of p(x) is added unless an LP shows it is implied.
        for (std::size_t x = 0; x < k_; ++x) {
            LinearProgram lp;
            lp.num_vars = k_;
            lp.objective.assign(k_, 0.0);
            lp.objective[x] = 1.0;
            for (std::size_t i = 0; i < constraints_.size(); ++i)
                lp.add_ge(homogeneous_[i].gamma, 0.0);
            lp.add_eq(std::vector<double>(k_, 1.0), 1.0);
            auto sol = solve(lp);
            if (sol.status == LpStatus::infeasible) throw ModelError("credal set is empty");
            bool implied = sol.status == LpStatus::optimal && sol.optimum >= -tau_feas;
            if (!implied) {
                HomogeneousConstraint h{std::vector<double>(k_, 0.0)};
                h.gamma[x] = 1.0;
                homogeneous_.push_back(std::move(h));
            }
        }
    }

    std::size_t k_ = 0;
    std::vector<MassFunction> vertices_;
    std::vector<LinearConstraint> constraints_;
    std::vector<HomogeneousConstraint> homogeneous_;
    bool vertices_given_ = false;
    bool constraints_given_ = false;
};

inline void check_width(const CredalSet& m, const std::vector<double>& f) {
    if (f.size() != m.states()) throw InputError("function width differs from state count");
}

inline double local_lower_expectation(const CredalSet& m, const std::vector<double>& f) {
    check_width(m, f);
    const auto& vs = m.vertices();
    if (vs.empty()) throw ModelError("credal set is empty");
    double best = detail::dot(vs[0], f);
    for (std::size_t i = 1; i < vs.size(); ++i) {
        double e = detail::dot(vs[i], f);
        if (e < best) best = e;
    }
    return best;
}

inline double local_upper_expectation(const CredalSet& m, const std::vector<double>& f) {
    std::vector<double> neg(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) neg[i] = -f[i];
    return -local_lower_expectation(m, neg);
}

/// Same quantity computed through the constraint representation.
inline double local_lower_expectation_lp(const CredalSet& m, const std::vector<double>& f) {
    check_width(m, f);
    LinearProgram lp;
    lp.num_vars = m.states();
    lp.nonnegative = true;
    lp.objective = f;
    for (auto& c : m.constraints()) lp.add_ge(c.alpha, c.beta);
    lp.add_eq(std::vector<double>(m.states(), 1.0), 1.0);
    auto sol = solve(lp);
    if (sol.status != LpStatus::optimal) throw ModelError("credal set is empty");
    return sol.optimum;
}

inline std::vector<double> indicator(std::size_t k, const std::vector<std::size_t>& A) {
    std::vector<double> f(k, 0.0);
    for (auto a : A) {
        if (a >= k) throw InputError("state index out of range");
        f[a] = 1.0;
    }
    return f;
}

inline double local_lower_probability(const CredalSet& m, const std::vector<std::size_t>& A) {
    return local_lower_expectation(m, indicator(m.states(), A));
}

inline double local_upper_probability(const CredalSet& m, const std::vector<std::size_t>& A) {
    return local_upper_expectation(m, indicator(m.states(), A));
}

inline std::vector<HomogeneousConstraint> to_homogeneous(const CredalSet& m) { return m.homogeneous(); }

inline std::vector<LinearConstraint> vertices_to_constraints(const CredalSet& m) {
    if (m.constraints_given()) {
        std::vector<LinearConstraint> out;
        for (auto& g : facets_of_hull(m.vertices(), m.states())) out.push_back({g, 0.0});
        return out;
    }
    return m.constraints();
}

inline std::vector<MassFunction> constraints_to_vertices(const CredalSet& m) {
    std::vector<Vec> gammas;
    for (auto& h : m.homogeneous()) gammas.push_back(h.gamma);
    return simplex_section_vertices(gammas, m.states());
}

} // namespace credal
