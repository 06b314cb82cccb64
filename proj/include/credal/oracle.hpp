#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "credal/errors.hpp"
#include "credal/global_lp.hpp"
#include "credal/network.hpp"

namespace credal {

inline constexpr std::uint64_t max_selections = 1000000;

/// One vertex index per (node, parent configuration), in node then
/// configuration order.
struct BayesianSelection {
    std::vector<std::vector<std::size_t>> choice;
};

/// Joint mass function of the Bayesian network picked by a selection.
inline std::vector<double> selection_joint(const CredalNetwork& net, const BayesianSelection& sel) {
    NodeSet G = net.dag().all();
    auto cards = net.cards(G);
    std::vector<double> p;
    p.reserve(checked_product(cards));
    for (StateCounter it(cards); !it.done(); it.next()) {
        double prob = 1.0;
        auto& x = it.values();
        for (NodeId s = 0; s < net.size() && prob != 0.0; ++s) {
            std::size_t c = net.config_of(s, [&](NodeId q) { return x[q]; });
            prob *= net.local(s, c).vertices()[sel.choice[s][c]][x[s]];
        }
        p.push_back(prob);
    }
    return p;
}

/// Minimum over every Bayesian network with local models at local vertices,
/// for several factors at once.
inline std::vector<double> complete_extension_lower(const CredalNetwork& net, const std::vector<Factor>& fs) {
    std::vector<std::size_t> radix;
    std::uint64_t total = 1;
    for (NodeId s = 0; s < net.size(); ++s)
        for (std::size_t c = 0; c < net.config_count(s); ++c) {
            radix.push_back(net.local(s, c).vertices().size());
            total *= radix.back();
            if (total > max_selections) throw CapabilityError("more than 10^6 Bayesian selections");
        }
    NodeSet G = net.dag().all();
    std::vector<std::vector<double>> tables;
    for (auto& f : fs) tables.push_back(extend(net, f, G).table);
    std::vector<double> best(fs.size(), std::numeric_limits<double>::infinity());
    BayesianSelection sel;
    sel.choice.resize(net.size());
    for (StateCounter it(radix); !it.done(); it.next()) {
        std::size_t k = 0;
        for (NodeId s = 0; s < net.size(); ++s) {
            sel.choice[s].resize(net.config_count(s));
            for (auto& c : sel.choice[s]) c = it.values()[k++];
        }
        auto p = selection_joint(net, sel);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            double e = 0.0;
            for (std::size_t z = 0; z < p.size(); ++z) e += p[z] * tables[i][z];
            if (e < best[i]) best[i] = e;
        }
    }
    return best;
}

inline double complete_extension_lower(const CredalNetwork& net, const Factor& f) {
    return complete_extension_lower(net, std::vector<Factor>{f})[0];
}

namespace detail {

inline constexpr std::size_t oracle_ray_budget = 4000;

// min Σ f·B·y over the cone of the global program, with Σ B·y = 1. The
// Charnes-Cooper form of the linear-fractional minimum, attained at the same
// extreme point the enumeration would find.
inline std::optional<double> fractional_conditional(const CredalNetwork& net, const std::vector<double>& ft,
                                                    const std::vector<double>& bt) {
    auto global = build_global_lp(net, Factor::constant(0.0), true);
    LinearProgram q;
    q.num_vars = global.num_vars;
    q.nonnegative = true;
    q.objective.resize(q.num_vars);
    for (std::size_t z = 0; z < q.num_vars; ++z) q.objective[z] = ft[z] * bt[z];
    for (auto& r : global.ge) {
        if (r.bound != 0.0) throw ModelError("global program rows are not homogeneous");
        q.add_ge(r.coef, 0.0);
    }
    q.add_eq(bt, 1.0);
    auto sol = solve(q);
    if (sol.status != LpStatus::optimal) return std::nullopt;
    return sol.optimum;
}

} // namespace detail

/// Conditional lower expectation as the minimum over extreme points of the
/// global polytope with p(B) > 0. Empty when the rule's value is not
/// determined this way: the natural rule with a zero lower probability, or an
/// event of upper probability zero. Falls back to the equivalent fractional
/// program when the vertex set is too large to list.
inline std::optional<double> irr_extreme_conditional(const CredalNetwork& net, const Factor& f, const Event& B,
                                                     bool regular) {
    const double zero = 1e-10;
    NodeSet G = net.dag().all();
    auto ft = extend(net, f, G).table;
    auto bt = extend(net, B.indicator(), G).table;
    std::vector<MassFunction> pts;
    try {
        pts = enumerate_joint_extreme_points(net, detail::oracle_ray_budget);
    } catch (const CapabilityError&) {
        if (net.joint_size(G) > max_vertex_enum_states) throw;
        if (!regular && lower_expectation_lp(net, B.indicator()) <= zero) return std::nullopt;
        if (upper_expectation_lp(net, B.indicator()) <= zero) return std::nullopt;
        return detail::fractional_conditional(net, ft, bt);
    }
    std::optional<double> best;
    for (auto& p : pts) {
        double pb = 0.0, num = 0.0;
        for (std::size_t z = 0; z < p.size(); ++z) {
            pb += p[z] * bt[z];
            num += p[z] * bt[z] * ft[z];
        }
        if (pb <= zero) {
            if (!regular) return std::nullopt;
            continue;
        }
        double v = num / pb;
        if (!best || v < *best) best = v;
    }
    return best;
}

} // namespace credal
