#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "credal/credal.hpp"

namespace credal::testing {

inline std::string data_path(const std::string& file) { return std::string(CREDAL_DATA_DIR) + "/" + file; }

/// Two unconnected binary nodes, each with p(h) in [1/4, 3/4].
inline CredalNetwork two_coins() {
    return NetworkBuilder()
        .node("1", {"h", "t"})
        .node("2", {"h", "t"})
        .local_all("1", CredalSet::interval(0.25, 0.75))
        .local_all("2", CredalSet::interval(0.25, 0.75))
        .build();
}

/// Indicator of "both coins show the same face".
inline Factor agreement(const CredalNetwork& net) { return Factor::on(net, net.dag().all(), {1, 0, 0, 1}); }

/// The ten-node graph used for the separation and reduction examples.
inline Dag ten_node_dag() {
    std::vector<std::string> names;
    for (int i = 1; i <= 10; ++i) names.push_back(std::to_string(i));
    return Dag(names, {{"1", "3"}, {"2", "3"}, {"3", "4"}, {"3", "5"}, {"5", "7"},
                       {"5", "8"}, {"6", "8"}, {"4", "7"}, {"7", "9"}, {"7", "10"}});
}

inline NodeSet names_to_set(const Dag& dag, std::initializer_list<const char*> names) {
    std::vector<NodeId> ids;
    for (auto n : names) ids.push_back(dag.index(n));
    return NodeSet(ids);
}

struct RandomNetOptions {
    std::size_t min_nodes = 1;
    std::size_t max_nodes = 4;
    double edge_probability = 0.5;
    /// Chance that a local vertex puts zero mass on one state.
    double zero_probability = 0.0;
    /// Chance that a local set is a single mass function.
    double singleton_probability = 0.0;
};

inline Dag random_dag(std::mt19937_64& rng, std::size_t n, double edge_probability) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    // Shuffle a topological order so declaration order and edge direction differ.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::bernoulli_distribution edge(edge_probability);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (edge(rng)) edges.emplace_back(names[perm[i]], names[perm[j]]);
    return Dag(names, edges);
}

/// Random binary mass value in [0, 1] on a 1/16 grid, kept off the ends unless
/// a zero is requested.
inline double random_level(std::mt19937_64& rng, double zero_probability) {
    std::bernoulli_distribution zero(zero_probability);
    if (zero(rng)) return std::bernoulli_distribution(0.5)(rng) ? 0.0 : 1.0;
    return static_cast<double>(std::uniform_int_distribution<int>(1, 15)(rng)) / 16.0;
}

inline CredalSet random_binary_set(std::mt19937_64& rng, const RandomNetOptions& opt) {
    double a = random_level(rng, opt.zero_probability);
    if (std::bernoulli_distribution(opt.singleton_probability)(rng)) return CredalSet::singleton({a, 1.0 - a});
    double b = a;
    while (b == a) b = random_level(rng, opt.zero_probability);
    return CredalSet::interval(std::min(a, b), std::max(a, b));
}

/// Binary network on at most four nodes with two-vertex local sets.
inline CredalNetwork random_net(std::mt19937_64& rng, const RandomNetOptions& opt = {}) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(opt.min_nodes, opt.max_nodes)(rng);
    Dag dag = random_dag(rng, n, opt.edge_probability);
    NetworkBuilder b;
    for (NodeId v = 0; v < n; ++v) b.node(dag.name(v), {"0", "1"});
    for (auto [u, v] : dag.edges()) b.edge(dag.name(u), dag.name(v));
    for (NodeId v = 0; v < n; ++v) {
        std::size_t configs = std::size_t{1} << dag.parents(v).size();
        for (std::size_t c = 0; c < configs; ++c) b.local(dag.name(v), c, random_binary_set(rng, opt));
    }
    return b.build();
}

/// Random binary chain n0 -> n1 -> ... with interval locals.
inline CredalNetwork random_chain(std::mt19937_64& rng, std::size_t length, const RandomNetOptions& opt = {}) {
    NetworkBuilder b;
    for (std::size_t i = 0; i < length; ++i) b.node("n" + std::to_string(i), {"0", "1"});
    for (std::size_t i = 0; i + 1 < length; ++i) b.edge("n" + std::to_string(i), "n" + std::to_string(i + 1));
    b.local("n0", 0, random_binary_set(rng, opt));
    for (std::size_t i = 1; i < length; ++i)
        for (std::size_t c = 0; c < 2; ++c) b.local("n" + std::to_string(i), c, random_binary_set(rng, opt));
    return b.build();
}

inline Factor random_factor(std::mt19937_64& rng, const CredalNetwork& net, const NodeSet& scope, double lo = -2.0,
                            double hi = 2.0) {
    auto f = Factor::zeros(net, scope);
    std::uniform_real_distribution<double> d(lo, hi);
    for (double& x : f.table) x = d(rng);
    return f;
}

inline NodeSet random_subset(std::mt19937_64& rng, const NodeSet& from, bool nonempty = true) {
    for (;;) {
        std::vector<NodeId> ids;
        for (auto v : from)
            if (std::bernoulli_distribution(0.5)(rng)) ids.push_back(v);
        if (!ids.empty() || !nonempty || from.empty()) return NodeSet(ids);
    }
}

inline JointAssignment random_assignment(std::mt19937_64& rng, const CredalNetwork& net, const NodeSet& S) {
    JointAssignment x{S, {}};
    for (auto v : S) x.values.push_back(std::uniform_int_distribution<std::size_t>(0, net.card(v) - 1)(rng));
    return x;
}

/// Non-negative and summing to one, within tol.
inline bool is_mass_function(const std::vector<double>& p, double tol = tau_feas) {
    double s = 0.0;
    for (double x : p) {
        if (x < -tol) return false;
        s += x;
    }
    return std::fabs(s - 1.0) <= tol;
}

/// Subsets of {0..n-1}, each as a NodeSet.
inline std::vector<NodeSet> all_subsets(std::size_t n) {
    std::vector<NodeSet> out;
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        std::vector<NodeId> ids;
        for (NodeId v = 0; v < n; ++v)
            if (m >> v & 1) ids.push_back(v);
        out.emplace_back(ids);
    }
    return out;
}

} // namespace credal::testing
