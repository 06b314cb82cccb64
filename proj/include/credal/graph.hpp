#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "credal/errors.hpp"

namespace credal {

using NodeId = std::size_t;

/// Sorted set of node indices. Indices follow declaration order, so iteration
/// order is declaration order.
class NodeSet {
public:
    NodeSet() = default;
    NodeSet(std::initializer_list<NodeId> ids) : ids_(ids) { normalise(); }
    explicit NodeSet(std::vector<NodeId> ids) : ids_(std::move(ids)) { normalise(); }

    static NodeSet from_mask(const std::vector<bool>& mask) {
        NodeSet out;
        for (NodeId i = 0; i < mask.size(); ++i)
            if (mask[i]) out.ids_.push_back(i);
        return out;
    }

    std::vector<bool> mask(std::size_t n) const {
        std::vector<bool> m(n, false);
        for (auto i : ids_) m[i] = true;
        return m;
    }

    bool contains(NodeId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }
    bool empty() const { return ids_.empty(); }
    std::size_t size() const { return ids_.size(); }
    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }
    NodeId operator[](std::size_t i) const { return ids_[i]; }
    const std::vector<NodeId>& ids() const { return ids_; }

    void insert(NodeId v) {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
        if (it == ids_.end() || *it != v) ids_.insert(it, v);
    }

    /// Position of v inside the set, or size() if absent.
    std::size_t position(NodeId v) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
        if (it == ids_.end() || *it != v) return ids_.size();
        return static_cast<std::size_t>(it - ids_.begin());
    }

    bool subset_of(const NodeSet& o) const {
        return std::includes(o.ids_.begin(), o.ids_.end(), ids_.begin(), ids_.end());
    }
    bool disjoint(const NodeSet& o) const { return (*this & o).empty(); }

    friend NodeSet operator|(const NodeSet& a, const NodeSet& b) {
        NodeSet out;
        std::set_union(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                       std::back_inserter(out.ids_));
        return out;
    }
    friend NodeSet operator&(const NodeSet& a, const NodeSet& b) {
        NodeSet out;
        std::set_intersection(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                              std::back_inserter(out.ids_));
        return out;
    }
    friend NodeSet operator-(const NodeSet& a, const NodeSet& b) {
        NodeSet out;
        std::set_difference(a.ids_.begin(), a.ids_.end(), b.ids_.begin(), b.ids_.end(),
                            std::back_inserter(out.ids_));
        return out;
    }
    friend bool operator==(const NodeSet& a, const NodeSet& b) { return a.ids_ == b.ids_; }

private:
    void normalise() {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    }
    std::vector<NodeId> ids_;
};

struct Relations {
    NodeSet parents;
    NodeSet children;
    NodeSet descendants;
    NodeSet non_descendants;
    NodeSet non_parent_non_descendants;
};

struct SetRelations {
    NodeSet parents;
    NodeSet descendants;
    NodeSet non_descendants;
    NodeSet non_parent_non_descendants;
};

using Edge = std::pair<std::string, std::string>;

class Dag {
public:
    Dag() = default;

    /// Throws InputError listing every structural problem.
    Dag(std::vector<std::string> names, const std::vector<Edge>& edges) : names_(std::move(names)) {
        auto issues = problems(names_, edges);
        if (!issues.empty()) {
            std::string msg = "invalid graph:";
            for (auto& p : issues) msg += " " + p + ";";
            throw InputError(msg);
        }
        index_names();
        parents_.assign(names_.size(), {});
        children_.assign(names_.size(), {});
        for (auto& [a, b] : edges) {
            NodeId u = index_.at(a), v = index_.at(b);
            children_[u].push_back(v);
            parents_[v].push_back(u);
        }
        for (auto& p : parents_) std::sort(p.begin(), p.end());
        for (auto& c : children_) std::sort(c.begin(), c.end());
    }

    /// Structural problems of a graph description; empty when it is a valid DAG.
    static std::vector<std::string> problems(const std::vector<std::string>& names,
                                             const std::vector<Edge>& edges) {
        std::vector<std::string> out;
        std::unordered_map<std::string, NodeId> idx;
        for (NodeId i = 0; i < names.size(); ++i) {
            if (names[i].empty()) out.push_back("empty node name");
            if (!idx.emplace(names[i], i).second) out.push_back("duplicate node '" + names[i] + "'");
        }
        std::vector<std::vector<NodeId>> succ(names.size());
        std::vector<std::pair<NodeId, NodeId>> seen;
        for (auto& [a, b] : edges) {
            auto ia = idx.find(a), ib = idx.find(b);
            if (ia == idx.end() || ib == idx.end()) {
                out.push_back("edge " + a + "->" + b + " uses an undeclared node");
                continue;
            }
            if (ia->second == ib->second) {
                out.push_back("self-loop on '" + a + "'");
                continue;
            }
            std::pair<NodeId, NodeId> e{ia->second, ib->second};
            if (std::find(seen.begin(), seen.end(), e) != seen.end()) {
                out.push_back("duplicate edge " + a + "->" + b);
                continue;
            }
            seen.push_back(e);
            succ[e.first].push_back(e.second);
        }
        // Kahn's algorithm; leftover nodes sit on or behind a cycle.
        std::vector<std::size_t> indeg(names.size(), 0);
        for (auto& s : succ)
            for (auto v : s) ++indeg[v];
        std::vector<NodeId> stack;
        for (NodeId i = 0; i < names.size(); ++i)
            if (indeg[i] == 0) stack.push_back(i);
        std::size_t done = 0;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            ++done;
            for (auto v : succ[u])
                if (--indeg[v] == 0) stack.push_back(v);
        }
        if (done != names.size()) out.push_back("acyclicity violated");
        return out;
    }

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(NodeId v) const { return names_.at(v); }

    NodeId index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw InputError("unknown node '" + name + "'");
        return it->second;
    }
    bool has(const std::string& name) const { return index_.count(name) != 0; }

    NodeSet all() const {
        std::vector<NodeId> v(names_.size());
        for (NodeId i = 0; i < v.size(); ++i) v[i] = i;
        return NodeSet(std::move(v));
    }

    const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(v); }
    const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }
    bool has_edge(NodeId u, NodeId v) const {
        auto& c = children_.at(u);
        return std::binary_search(c.begin(), c.end(), v);
    }

    std::vector<std::pair<NodeId, NodeId>> edges() const {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (NodeId u = 0; u < size(); ++u)
            for (auto v : children_[u]) out.emplace_back(u, v);
        return out;
    }

    /// Strict descendants of every member of `from`, as a mask.
    std::vector<bool> reach_down(const NodeSet& from) const { return reach(from, children_); }
    std::vector<bool> reach_up(const NodeSet& from) const { return reach(from, parents_); }

    NodeSet descendants(NodeId v) const { return NodeSet::from_mask(reach_down(NodeSet{v})); }
    NodeSet ancestors(NodeId v) const { return NodeSet::from_mask(reach_up(NodeSet{v})); }

    /// Nodes in an order where parents precede children; ties by declaration.
    std::vector<NodeId> topological_order() const {
        std::vector<std::size_t> indeg(size());
        for (NodeId v = 0; v < size(); ++v) indeg[v] = parents_[v].size();
        std::vector<NodeId> order;
        std::vector<NodeId> ready;
        for (NodeId v = 0; v < size(); ++v)
            if (indeg[v] == 0) ready.push_back(v);
        while (!ready.empty()) {
            auto it = std::min_element(ready.begin(), ready.end());
            NodeId u = *it;
            ready.erase(it);
            order.push_back(u);
            for (auto c : children_[u])
                if (--indeg[c] == 0) ready.push_back(c);
        }
        return order;
    }

    void check(const NodeSet& K) const {
        for (auto v : K)
            if (v >= size()) throw InputError("node index out of range");
    }

private:
    void index_names() {
        for (NodeId i = 0; i < names_.size(); ++i) index_[names_[i]] = i;
    }

    std::vector<bool> reach(const NodeSet& from, const std::vector<std::vector<NodeId>>& adj) const {
        std::vector<bool> seen(size(), false);
        std::vector<NodeId> stack;
        for (auto v : from) {
            if (v >= size()) throw InputError("node index out of range");
            for (auto w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (auto w : adj[u])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        return seen;
    }

    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::vector<NodeId>> parents_;
    std::vector<std::vector<NodeId>> children_;
};

inline Relations relations(const Dag& dag, NodeId s) {
    if (s >= dag.size()) throw InputError("unknown node index");
    Relations r;
    r.parents = NodeSet(dag.parents(s));
    r.children = NodeSet(dag.children(s));
    r.descendants = dag.descendants(s);
    r.non_descendants = dag.all() - r.descendants - NodeSet{s};
    r.non_parent_non_descendants = r.non_descendants - r.parents;
    return r;
}

inline SetRelations set_relations(const Dag& dag, const NodeSet& K) {
    dag.check(K);
    SetRelations r;
    std::vector<NodeId> pa;
    for (auto k : K)
        for (auto p : dag.parents(k)) pa.push_back(p);
    r.parents = NodeSet(std::move(pa)) - K;
    r.descendants = NodeSet::from_mask(dag.reach_down(K)) - K;
    r.non_descendants = dag.all() - K - r.descendants;
    r.non_parent_non_descendants = r.non_descendants - r.parents;
    return r;
}

/// Every node on a directed path between two members of K lies in K.
inline bool is_closed(const Dag& dag, const NodeSet& K) {
    dag.check(K);
    auto down = dag.reach_down(K);
    auto up = dag.reach_up(K);
    for (NodeId v = 0; v < dag.size(); ++v)
        if (down[v] && up[v] && !K.contains(v)) return false;
    return true;
}

/// Smallest closed superset of K.
inline NodeSet closure(const Dag& dag, const NodeSet& K) {
    auto down = dag.reach_down(K);
    auto up = dag.reach_up(K);
    NodeSet out = K;
    for (NodeId v = 0; v < dag.size(); ++v)
        if (down[v] && up[v]) out.insert(v);
    return out;
}

/// K together with all its ancestors.
inline NodeSet ancestral_closure(const Dag& dag, const NodeSet& K) {
    return K | NodeSet::from_mask(dag.reach_up(K));
}

using Path = std::vector<NodeId>;

enum class Criterion { ad, d };

namespace detail {

inline bool path_blocked_impl(const Dag& dag, const Path& path, const NodeSet& C, Criterion crit) {
    if (path.empty()) throw InputError("empty path");
    for (auto v : path)
        if (v >= dag.size()) throw InputError("path uses an unknown node");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (!dag.has_edge(path[i], path[i + 1]) && !dag.has_edge(path[i + 1], path[i]))
            throw InputError("path has non-adjacent consecutive nodes");
    if (C.contains(path.front()) || C.contains(path.back())) return true;
    auto above_c = dag.reach_up(C);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        NodeId prev = path[i - 1], v = path[i], next = path[i + 1];
        bool in_c = C.contains(v);
        if (in_c && dag.has_edge(v, next)) return true;
        if (crit == Criterion::d && in_c && dag.has_edge(v, prev)) return true;
        bool collider = dag.has_edge(prev, v) && dag.has_edge(next, v);
        if (collider && !in_c && !above_c[v]) return true;
    }
    return false;
}

// Reachability over (node, arrival direction) states. `down` means the node
// was entered along an edge from one of its parents.
inline bool separated_traversal(const Dag& dag, const NodeSet& I, const NodeSet& S, const NodeSet& C,
                                Criterion crit) {
    dag.check(I);
    dag.check(S);
    dag.check(C);
    const std::size_t n = dag.size();
    auto in_c = C.mask(n);
    auto in_s = S.mask(n);
    auto above_c = dag.reach_up(C);
    std::vector<bool> seen_down(n, false), seen_up(n, false);
    std::vector<std::pair<NodeId, bool>> stack;
    auto push = [&](NodeId v, bool down) {
        auto& seen = down ? seen_down : seen_up;
        if (!seen[v]) {
            seen[v] = true;
            stack.emplace_back(v, down);
        }
    };
    for (auto i : I) {
        if (in_c[i]) continue;
        if (in_s[i]) return false;
        for (auto c : dag.children(i)) push(c, true);
        for (auto p : dag.parents(i)) push(p, false);
    }
    while (!stack.empty()) {
        auto [v, down] = stack.back();
        stack.pop_back();
        if (in_s[v] && !in_c[v]) return false;
        if (in_c[v]) {
            // Only a step towards a parent survives; d-separation also needs
            // v to be entered from a parent (a collider).
            if (crit == Criterion::ad || down)
                for (auto p : dag.parents(v)) push(p, false);
            continue;
        }
        for (auto c : dag.children(v)) push(c, true);
        if (!down || above_c[v])
            for (auto p : dag.parents(v)) push(p, false);
    }
    return true;
}

inline bool separated_by_paths(const Dag& dag, const NodeSet& I, const NodeSet& S, const NodeSet& C,
                               Criterion crit) {
    const std::size_t n = dag.size();
    if (n > 12) throw CapabilityError("explicit path enumeration is limited to 12 nodes");
    std::vector<std::vector<NodeId>> nbr(n);
    for (NodeId v = 0; v < n; ++v) {
        for (auto p : dag.parents(v)) nbr[v].push_back(p);
        for (auto c : dag.children(v)) nbr[v].push_back(c);
    }
    Path path;
    std::vector<bool> on(n, false);
    bool found = false;
    auto dfs = [&](auto&& self, NodeId v) -> void {
        if (found) return;
        path.push_back(v);
        on[v] = true;
        if (S.contains(v) && !path_blocked_impl(dag, path, C, crit)) found = true;
        for (auto w : nbr[v])
            if (!on[w]) self(self, w);
        on[v] = false;
        path.pop_back();
    };
    for (auto i : I) dfs(dfs, i);
    return !found;
}

} // namespace detail

inline bool path_blocked(const Dag& dag, const Path& path, const NodeSet& C) {
    return detail::path_blocked_impl(dag, path, C, Criterion::ad);
}

inline bool path_blocked_d(const Dag& dag, const Path& path, const NodeSet& C) {
    return detail::path_blocked_impl(dag, path, C, Criterion::d);
}

/// Every path from I to S is blocked. With `enumerate_paths` the answer comes
/// from listing every simple path (small graphs only).
inline bool ad_separated(const Dag& dag, const NodeSet& I, const NodeSet& S, const NodeSet& C,
                         bool enumerate_paths = false) {
    if (enumerate_paths) return detail::separated_by_paths(dag, I, S, C, Criterion::ad);
    return detail::separated_traversal(dag, I, S, C, Criterion::ad);
}

inline bool d_separated(const Dag& dag, const NodeSet& I, const NodeSet& S, const NodeSet& C,
                        bool enumerate_paths = false) {
    if (enumerate_paths) return detail::separated_by_paths(dag, I, S, C, Criterion::d);
    return detail::separated_traversal(dag, I, S, C, Criterion::d);
}

/// Separation via the existence of a closed K with S ⊆ K, P(K) ⊆ C,
/// I ⊆ NN(K) and D(K) ∩ C = ∅. Exhaustive over candidate K.
inline bool ad_separated_closed(const Dag& dag, const NodeSet& I, const NodeSet& S, const NodeSet& C,
                                NodeSet* witness = nullptr) {
    dag.check(I);
    dag.check(S);
    dag.check(C);
    if (!I.disjoint(S) || !I.disjoint(C) || !S.disjoint(C))
        throw InputError("ad_separated_closed needs pairwise disjoint sets");
    const std::size_t n = dag.size();
    if (n > 24) throw CapabilityError("closed-set search is limited to 24 nodes");
    using Mask = std::uint32_t;
    auto to_mask = [](const NodeSet& s) {
        Mask m = 0;
        for (auto v : s) m |= Mask{1} << v;
        return m;
    };
    std::vector<Mask> desc(n), anc(n), par(n);
    for (NodeId v = 0; v < n; ++v) {
        desc[v] = to_mask(dag.descendants(v));
        anc[v] = to_mask(dag.ancestors(v));
        par[v] = to_mask(NodeSet(dag.parents(v)));
    }
    const Mask all = n == 32 ? ~Mask{0} : ((Mask{1} << n) - 1);
    const Mask mi = to_mask(I), ms = to_mask(S), mc = to_mask(C);
    // K contains S and avoids I; enumerate the free part.
    std::vector<NodeId> free;
    for (NodeId v = 0; v < n; ++v)
        if (!((mi | ms) >> v & 1)) free.push_back(v);
    const std::uint64_t count = std::uint64_t{1} << free.size();
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        Mask k = ms;
        for (std::size_t j = 0; j < free.size(); ++j)
            if (bits >> j & 1) k |= Mask{1} << free[j];
        Mask dk = 0, ak = 0, pk = 0;
        for (NodeId v = 0; v < n; ++v)
            if (k >> v & 1) {
                dk |= desc[v];
                ak |= anc[v];
                pk |= par[v];
            }
        if (dk & ak & ~k) continue;
        dk &= ~k;
        pk &= ~k;
        Mask nn = all & ~(k | dk | pk);
        if ((pk & ~mc) == 0 && (mi & ~nn) == 0 && (dk & mc) == 0) {
            if (witness) {
                std::vector<NodeId> ids;
                for (NodeId v = 0; v < n; ++v)
                    if (k >> v & 1) ids.push_back(v);
                *witness = NodeSet(std::move(ids));
            }
            return true;
        }
    }
    return false;
}

} // namespace credal
