#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credal/errors.hpp"
#include "credal/graph.hpp"
#include "credal/local_models.hpp"

namespace credal {

inline constexpr std::uint64_t max_joint_states = std::uint64_t{1} << 24;

/// Product of cardinalities with the joint-state overflow guard.
inline std::size_t checked_product(const std::vector<std::size_t>& cards) {
    std::uint64_t n = 1;
    for (auto c : cards) {
        n *= c;
        if (n > max_joint_states) throw CapabilityError("more than 2^24 joint states");
    }
    return static_cast<std::size_t>(n);
}

/// Odometer over joint states, last position fastest.
class StateCounter {
public:
    explicit StateCounter(std::vector<std::size_t> cards) : cards_(std::move(cards)), v_(cards_.size(), 0) {
        for (auto c : cards_)
            if (c == 0) done_ = true;
    }
    const std::vector<std::size_t>& values() const { return v_; }
    bool done() const { return done_; }
    void next() {
        for (std::size_t i = cards_.size(); i-- > 0;) {
            if (++v_[i] < cards_[i]) return;
            v_[i] = 0;
        }
        done_ = true;
    }

private:
    std::vector<std::size_t> cards_;
    std::vector<std::size_t> v_;
    bool done_ = false;
};

/// Raw network as read from a file; validate() reports its problems.
struct LocalSpec {
    std::string node;
    std::map<std::string, std::string> parents;
    std::optional<std::vector<MassFunction>> vertices;
    std::optional<std::vector<LinearConstraint>> constraints;
};

struct NodeSpec {
    std::string name;
    std::vector<std::string> states;
};

struct NetworkDescription {
    std::vector<NodeSpec> nodes;
    std::vector<Edge> edges;
    std::vector<LocalSpec> locals;
};

inline CredalSet make_credal_set(std::size_t k, const LocalSpec& l) {
    if (l.vertices && l.constraints) return CredalSet::from_both(k, *l.vertices, *l.constraints);
    if (l.vertices) return CredalSet::from_vertices(k, *l.vertices);
    if (l.constraints) return CredalSet::from_constraints(k, *l.constraints);
    throw ModelError("local model has neither vertices nor constraints");
}

struct JointAssignment {
    NodeSet scope;
    std::vector<std::size_t> values;  // aligned with scope order

    std::size_t at(NodeId v) const {
        auto p = scope.position(v);
        if (p == scope.size()) throw InputError("node not in assignment scope");
        return values[p];
    }
};

class CredalNetwork {
public:
    using LocalPtr = std::shared_ptr<const CredalSet>;

    CredalNetwork() = default;

    /// locals[v][c] is the set for node v under parent configuration c.
    CredalNetwork(Dag dag, std::vector<std::vector<std::string>> states, std::vector<std::vector<LocalPtr>> locals)
        : dag_(std::move(dag)), states_(std::move(states)), locals_(std::move(locals)) {
        if (states_.size() != dag_.size() || locals_.size() != dag_.size())
            throw ModelError("network tables do not match the graph");
        for (NodeId v = 0; v < dag_.size(); ++v) {
            if (states_[v].empty()) throw ModelError("node '" + dag_.name(v) + "' has no states");
            if (locals_[v].size() != config_count(v))
                throw ModelError("node '" + dag_.name(v) + "' has the wrong number of local models");
            for (auto& m : locals_[v]) {
                if (!m) throw ModelError("missing local model for node '" + dag_.name(v) + "'");
                if (m->states() != states_[v].size())
                    throw ModelError("local model of '" + dag_.name(v) + "' has the wrong state count");
            }
        }
    }

    const Dag& dag() const { return dag_; }
    std::size_t size() const { return dag_.size(); }
    const std::string& name(NodeId v) const { return dag_.name(v); }
    NodeId index(const std::string& n) const { return dag_.index(n); }
    const std::vector<std::string>& states(NodeId v) const { return states_.at(v); }
    std::size_t card(NodeId v) const { return states_.at(v).size(); }

    std::size_t state_index(NodeId v, const std::string& s) const {
        auto& st = states_.at(v);
        auto it = std::find(st.begin(), st.end(), s);
        if (it == st.end()) throw InputError("unknown state '" + s + "' of node '" + name(v) + "'");
        return static_cast<std::size_t>(it - st.begin());
    }

    std::vector<std::size_t> cards(const NodeSet& S) const {
        std::vector<std::size_t> c;
        for (auto v : S) c.push_back(card(v));
        return c;
    }

    std::size_t config_count(NodeId v) const {
        std::size_t n = 1;
        for (auto p : dag_.parents(v)) n *= card(p);
        return n;
    }

    /// Parent configuration index from a lookup of each parent's value.
    template <class Lookup>
    std::size_t config_of(NodeId v, Lookup&& value_of) const {
        std::size_t c = 0;
        for (auto p : dag_.parents(v)) c = c * card(p) + value_of(p);
        return c;
    }

    std::vector<std::size_t> config_values(NodeId v, std::size_t c) const {
        auto& pa = dag_.parents(v);
        std::vector<std::size_t> out(pa.size());
        for (std::size_t i = pa.size(); i-- > 0;) {
            out[i] = c % card(pa[i]);
            c /= card(pa[i]);
        }
        return out;
    }

    /// Canonical key such as "3=h,4=t" (parents in declaration order).
    std::string config_key(NodeId v, std::size_t c) const {
        auto vals = config_values(v, c);
        auto& pa = dag_.parents(v);
        std::string key;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (i) key += ",";
            key += name(pa[i]) + "=" + states_[pa[i]][vals[i]];
        }
        return key;
    }

    const CredalSet& local(NodeId v, std::size_t c) const { return *locals_.at(v).at(c); }
    const LocalPtr& local_ptr(NodeId v, std::size_t c) const { return locals_.at(v).at(c); }

    const CredalSet& local_given(NodeId v, const JointAssignment& x) const {
        return local(v, config_of(v, [&](NodeId p) { return x.at(p); }));
    }

    JointAssignment assignment(const std::map<std::string, std::string>& named) const {
        std::vector<NodeId> ids;
        for (auto& [n, s] : named) ids.push_back(index(n));
        JointAssignment a{NodeSet(ids), {}};
        a.values.resize(a.scope.size());
        for (auto& [n, s] : named) {
            NodeId v = index(n);
            a.values[a.scope.position(v)] = state_index(v, s);
        }
        return a;
    }

    NodeSet node_set(const std::vector<std::string>& names) const {
        std::vector<NodeId> ids;
        for (auto& n : names) ids.push_back(index(n));
        return NodeSet(std::move(ids));
    }

    std::string describe(const NodeSet& S) const {
        std::string out = "{";
        bool first = true;
        for (auto v : S) {
            if (!first) out += ",";
            out += name(v);
            first = false;
        }
        return out + "}";
    }

    std::string describe(const JointAssignment& x) const {
        std::string out;
        for (std::size_t i = 0; i < x.scope.size(); ++i) {
            if (i) out += ",";
            out += name(x.scope[i]) + "=" + states(x.scope[i])[x.values[i]];
        }
        return out;
    }

    std::uint64_t joint_size(const NodeSet& S) const { return checked_product(cards(S)); }

    bool all_singleton() const {
        for (auto& row : locals_)
            for (auto& m : row)
                if (!m->is_singleton()) return false;
        return true;
    }

private:
    Dag dag_;
    std::vector<std::vector<std::string>> states_;
    std::vector<std::vector<LocalPtr>> locals_;
};

/// Every problem of a description, one entry each; empty when well formed.
inline std::vector<std::string> validate(const NetworkDescription& d) {
    std::vector<std::string> report;
    std::vector<std::string> names;
    for (auto& n : d.nodes) {
        names.push_back(n.name);
        if (n.states.empty()) report.push_back("node '" + n.name + "' has no states");
        auto st = n.states;
        std::sort(st.begin(), st.end());
        if (std::adjacent_find(st.begin(), st.end()) != st.end())
            report.push_back("node '" + n.name + "' has duplicate states");
    }
    for (auto& p : Dag::problems(names, d.edges)) report.push_back(p);
    if (!report.empty()) return report;

    Dag dag(names, d.edges);
    auto state_of = [&](NodeId v, const std::string& s) -> std::optional<std::size_t> {
        auto& st = d.nodes[v].states;
        auto it = std::find(st.begin(), st.end(), s);
        if (it == st.end()) return std::nullopt;
        return static_cast<std::size_t>(it - st.begin());
    };
    std::vector<std::vector<int>> seen(dag.size());
    for (NodeId v = 0; v < dag.size(); ++v) {
        std::size_t n = 1;
        for (auto p : dag.parents(v)) {
            n *= d.nodes[p].states.size();
            if (n > max_joint_states) break;
        }
        if (n > max_joint_states) {
            report.push_back("node '" + names[v] + "' has too many parent configurations");
            continue;
        }
        seen[v].assign(n, 0);
    }
    for (auto& l : d.locals) {
        if (!dag.has(l.node)) {
            report.push_back("local model for unknown node '" + l.node + "'");
            continue;
        }
        NodeId v = dag.index(l.node);
        auto& pa = dag.parents(v);
        bool ok = l.parents.size() == pa.size();
        std::size_t c = 0;
        for (auto p : pa) {
            auto it = l.parents.find(names[p]);
            if (it == l.parents.end()) {
                ok = false;
                break;
            }
            auto s = state_of(p, it->second);
            if (!s) {
                ok = false;
                break;
            }
            c = c * d.nodes[p].states.size() + *s;
        }
        if (!ok) {
            report.push_back("local model for '" + l.node + "' has a malformed parent configuration");
            continue;
        }
        if (seen[v].empty()) continue;
        if (seen[v][c]++) {
            report.push_back("duplicate local model for '" + l.node + "'");
            continue;
        }
        try {
            make_credal_set(d.nodes[v].states.size(), l);
        } catch (const Error& e) {
            report.push_back("local model for '" + l.node + "': " + e.what());
        }
    }
    for (NodeId v = 0; v < dag.size(); ++v)
        for (std::size_t c = 0; c < seen[v].size(); ++c)
            if (!seen[v][c]) {
                std::string key;
                std::size_t rest = c;
                auto& pa = dag.parents(v);
                std::vector<std::string> parts(pa.size());
                for (std::size_t i = pa.size(); i-- > 0;) {
                    auto& st = d.nodes[pa[i]].states;
                    parts[i] = names[pa[i]] + "=" + st[rest % st.size()];
                    rest /= st.size();
                }
                for (std::size_t i = 0; i < parts.size(); ++i) key += (i ? "," : "") + parts[i];
                report.push_back("missing local model for '" + names[v] + "' given {" + key + "}");
            }
    return report;
}

/// Builds the network, throwing ModelError with the full report on failure.
inline CredalNetwork build_network(const NetworkDescription& d) {
    auto report = validate(d);
    if (!report.empty()) {
        std::string msg = "invalid network:";
        for (auto& r : report) msg += "\n  " + r;
        throw ModelError(msg);
    }
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> states;
    for (auto& n : d.nodes) {
        names.push_back(n.name);
        states.push_back(n.states);
    }
    Dag dag(names, d.edges);
    std::vector<std::vector<CredalNetwork::LocalPtr>> locals(dag.size());
    for (NodeId v = 0; v < dag.size(); ++v) {
        std::size_t n = 1;
        for (auto p : dag.parents(v)) n *= states[p].size();
        locals[v].resize(n);
    }
    for (auto& l : d.locals) {
        NodeId v = dag.index(l.node);
        std::size_t c = 0;
        for (auto p : dag.parents(v)) {
            auto& st = states[p];
            auto idx = std::find(st.begin(), st.end(), l.parents.at(names[p])) - st.begin();
            c = c * st.size() + static_cast<std::size_t>(idx);
        }
        locals[v][c] = std::make_shared<const CredalSet>(make_credal_set(states[v].size(), l));
    }
    return CredalNetwork(std::move(dag), std::move(states), std::move(locals));
}

/// Programmatic construction, mainly for tests and generated fixtures.
class NetworkBuilder {
public:
    NetworkBuilder& node(const std::string& name, std::vector<std::string> states) {
        names_.push_back(name);
        states_.push_back(std::move(states));
        return *this;
    }
    NetworkBuilder& edge(const std::string& a, const std::string& b) {
        edges_.emplace_back(a, b);
        return *this;
    }
    /// Parent configurations are indexed in declaration order of the parents.
    NetworkBuilder& local(const std::string& name, std::size_t config, CredalSet m) {
        return local(name, config, std::make_shared<const CredalSet>(std::move(m)));
    }
    NetworkBuilder& local(const std::string& name, std::size_t config, CredalNetwork::LocalPtr m) {
        locals_.push_back({name, config, std::move(m)});
        return *this;
    }
    /// Same set for every parent configuration.
    NetworkBuilder& local_all(const std::string& name, CredalSet m) {
        auto p = std::make_shared<const CredalSet>(std::move(m));
        locals_.push_back({name, npos, std::move(p)});
        return *this;
    }

    CredalNetwork build() const {
        Dag dag(names_, edges_);
        std::vector<std::vector<CredalNetwork::LocalPtr>> locals(dag.size());
        for (NodeId v = 0; v < dag.size(); ++v) {
            std::size_t n = 1;
            for (auto p : dag.parents(v)) n *= states_[p].size();
            locals[v].resize(n);
        }
        for (auto& l : locals_) {
            NodeId v = dag.index(l.name);
            if (l.config == npos) {
                for (auto& slot : locals[v]) slot = l.set;
            } else {
                if (l.config >= locals[v].size()) throw InputError("parent configuration out of range");
                locals[v][l.config] = l.set;
            }
        }
        return CredalNetwork(std::move(dag), states_, std::move(locals));
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    struct Pending {
        std::string name;
        std::size_t config;
        CredalNetwork::LocalPtr set;
    };
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> states_;
    std::vector<Edge> edges_;
    std::vector<Pending> locals_;
};

/// Real-valued function on the joint states of `scope`; the table is laid out
/// with the last scope node varying fastest.
struct Factor {
    NodeSet scope;
    std::vector<std::size_t> cards;
    std::vector<double> table;

    Factor() : table{0.0} {}
    Factor(NodeSet s, std::vector<std::size_t> c, std::vector<double> t)
        : scope(std::move(s)), cards(std::move(c)), table(std::move(t)) {
        if (cards.size() != scope.size()) throw InputError("factor cardinalities do not match its scope");
        if (table.size() != checked_product(cards)) throw InputError("factor table has the wrong size");
    }

    static Factor constant(double c) {
        Factor f;
        f.table = {c};
        return f;
    }

    static Factor on(const CredalNetwork& net, const NodeSet& scope, std::vector<double> table) {
        return Factor(scope, net.cards(scope), std::move(table));
    }

    static Factor zeros(const CredalNetwork& net, const NodeSet& scope) {
        auto c = net.cards(scope);
        std::size_t n = checked_product(c);
        return Factor(scope, std::move(c), std::vector<double>(n, 0.0));
    }

    std::size_t index(const std::vector<std::size_t>& vals) const {
        std::size_t i = 0;
        for (std::size_t k = 0; k < cards.size(); ++k) i = i * cards[k] + vals[k];
        return i;
    }

    /// Value at an assignment covering the scope.
    template <class Lookup>
    double eval(Lookup&& value_of) const {
        std::size_t i = 0;
        for (std::size_t k = 0; k < cards.size(); ++k) i = i * cards[k] + value_of(scope[k]);
        return table[i];
    }

    double min() const { return *std::min_element(table.begin(), table.end()); }
    double max() const { return *std::max_element(table.begin(), table.end()); }

    Factor operator-() const {
        Factor g = *this;
        for (double& x : g.table) x = -x;
        return g;
    }
    Factor plus(double c) const {
        Factor g = *this;
        for (double& x : g.table) x += c;
        return g;
    }
    Factor times(double c) const {
        Factor g = *this;
        for (double& x : g.table) x *= c;
        return g;
    }
};

/// Re-expresses f on a larger scope (cylindrical extension).
inline Factor extend(const Factor& f, const NodeSet& scope, const std::vector<std::size_t>& cards) {
    if (!f.scope.subset_of(scope)) throw InputError("extension scope misses factor nodes");
    std::vector<std::size_t> where;
    for (auto v : f.scope) where.push_back(scope.position(v));
    std::vector<double> t;
    t.reserve(checked_product(cards));
    std::vector<std::size_t> sub(f.scope.size());
    for (StateCounter it(cards); !it.done(); it.next()) {
        for (std::size_t k = 0; k < where.size(); ++k) sub[k] = it.values()[where[k]];
        t.push_back(f.table[f.index(sub)]);
    }
    return Factor(scope, cards, std::move(t));
}

inline Factor extend(const CredalNetwork& net, const Factor& f, const NodeSet& scope) {
    return extend(f, scope, net.cards(scope));
}

/// Pointwise combination on the union scope.
template <class Op>
Factor combine(const CredalNetwork& net, const Factor& a, const Factor& b, Op op) {
    NodeSet u = a.scope | b.scope;
    auto fa = extend(net, a, u), fb = extend(net, b, u);
    for (std::size_t i = 0; i < fa.table.size(); ++i) fa.table[i] = op(fa.table[i], fb.table[i]);
    return fa;
}

/// Plugs in the values of x on scope ∩ T.
inline Factor restrict_factor(const Factor& f, const JointAssignment& x) {
    NodeSet fixed = f.scope & x.scope;
    if (fixed.empty()) return f;
    NodeSet rest = f.scope - fixed;
    std::vector<std::size_t> rest_cards;
    for (auto v : rest) rest_cards.push_back(f.cards[f.scope.position(v)]);
    std::vector<double> t;
    std::vector<std::size_t> full(f.scope.size());
    for (auto v : fixed) full[f.scope.position(v)] = x.at(v);
    std::vector<std::size_t> rest_pos;
    for (auto v : rest) rest_pos.push_back(f.scope.position(v));
    for (StateCounter it(rest_cards); !it.done(); it.next()) {
        for (std::size_t k = 0; k < rest_pos.size(); ++k) full[rest_pos[k]] = it.values()[k];
        t.push_back(f.table[f.index(full)]);
    }
    return Factor(rest, rest_cards, std::move(t));
}

/// Subset of the joint states of `scope`. Cylinder events have one member.
struct Event {
    NodeSet scope;
    std::vector<std::size_t> cards;
    std::vector<bool> member;
    bool cylinder = false;

    static Event cylinder_of(const CredalNetwork& net, const JointAssignment& x) {
        Event e;
        e.scope = x.scope;
        e.cards = net.cards(x.scope);
        e.member.assign(checked_product(e.cards), false);
        std::size_t i = 0;
        for (std::size_t k = 0; k < e.cards.size(); ++k) i = i * e.cards[k] + x.values[k];
        e.member[i] = true;
        e.cylinder = true;
        return e;
    }

    static Event of_states(const CredalNetwork& net, const NodeSet& scope,
                           const std::vector<std::vector<std::size_t>>& states) {
        Event e;
        e.scope = scope;
        e.cards = net.cards(scope);
        e.member.assign(checked_product(e.cards), false);
        for (auto& s : states) {
            if (s.size() != scope.size()) throw InputError("event state has the wrong width");
            std::size_t i = 0;
            for (std::size_t k = 0; k < e.cards.size(); ++k) {
                if (s[k] >= e.cards[k]) throw InputError("event state out of range");
                i = i * e.cards[k] + s[k];
            }
            e.member[i] = true;
        }
        return e;
    }

    /// The sure event.
    static Event everything() {
        Event e;
        e.member = {true};
        e.cylinder = true;
        return e;
    }

    bool empty() const { return std::find(member.begin(), member.end(), true) == member.end(); }
    bool is_sure() const { return std::find(member.begin(), member.end(), false) == member.end(); }

    /// The single member of a cylinder event.
    JointAssignment as_assignment() const {
        if (!cylinder) throw InputError("event is not a cylinder");
        auto it = std::find(member.begin(), member.end(), true);
        std::size_t i = static_cast<std::size_t>(it - member.begin());
        JointAssignment x{scope, std::vector<std::size_t>(scope.size())};
        for (std::size_t k = cards.size(); k-- > 0;) {
            x.values[k] = i % cards[k];
            i /= cards[k];
        }
        return x;
    }

    Factor indicator() const {
        std::vector<double> t(member.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = member[i] ? 1.0 : 0.0;
        return Factor(scope, cards, std::move(t));
    }
};

inline std::vector<JointAssignment> joint_states(const CredalNetwork& net, const NodeSet& S) {
    auto cards = net.cards(S);
    std::size_t n = checked_product(cards);
    std::vector<JointAssignment> out;
    out.reserve(n);
    for (StateCounter it(cards); !it.done(); it.next()) out.push_back({S, it.values()});
    return out;
}

/// Sub-network on K with the parents outside K fixed by x_paK. K need not be
/// closed. Node names are preserved; declaration order follows the original.
inline CredalNetwork sub_network(const CredalNetwork& net, const NodeSet& K, const JointAssignment& x_paK) {
    const Dag& dag = net.dag();
    dag.check(K);
    auto rel = set_relations(dag, K);
    for (auto p : rel.parents)
        if (!x_paK.scope.contains(p))
            throw InputError("parent '" + net.name(p) + "' of the sub-network is not assigned");
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> states;
    for (auto v : K) {
        names.push_back(net.name(v));
        states.push_back(net.states(v));
    }
    std::vector<Edge> edges;
    for (auto v : K)
        for (auto c : dag.children(v))
            if (K.contains(c)) edges.emplace_back(net.name(v), net.name(c));
    Dag sub(names, edges);
    std::vector<std::vector<CredalNetwork::LocalPtr>> locals(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) {
        NodeId v = K[i];
        auto& inner = sub.parents(i);
        std::vector<std::size_t> inner_cards;
        for (auto p : inner) inner_cards.push_back(states[p].size());
        for (StateCounter it(inner_cards); !it.done(); it.next()) {
            std::size_t c = net.config_of(v, [&](NodeId p) {
                if (K.contains(p)) {
                    NodeId local_p = K.position(p);
                    auto pos = std::find(inner.begin(), inner.end(), local_p) - inner.begin();
                    return it.values()[static_cast<std::size_t>(pos)];
                }
                return x_paK.at(p);
            });
            locals[i].push_back(net.local_ptr(v, c));
        }
    }
    return CredalNetwork(std::move(sub), std::move(states), std::move(locals));
}

/// Moves a factor between networks that share node names.
inline Factor translate(const Factor& f, const CredalNetwork& from, const CredalNetwork& to) {
    std::vector<NodeId> ids;
    for (auto v : f.scope) ids.push_back(to.index(from.name(v)));
    NodeSet scope(ids);
    // Relative order is preserved because both networks keep declaration order.
    return Factor(scope, to.cards(scope), f.table);
}

inline JointAssignment translate(const JointAssignment& x, const CredalNetwork& from, const CredalNetwork& to) {
    std::vector<NodeId> ids;
    for (auto v : x.scope) ids.push_back(to.index(from.name(v)));
    return JointAssignment{NodeSet(ids), x.values};
}

inline Event translate(const Event& e, const CredalNetwork& from, const CredalNetwork& to) {
    Event out = e;
    std::vector<NodeId> ids;
    for (auto v : e.scope) ids.push_back(to.index(from.name(v)));
    out.scope = NodeSet(ids);
    return out;
}

/// Restriction of x to the nodes in S.
inline JointAssignment project(const JointAssignment& x, const NodeSet& S) {
    JointAssignment out{x.scope & S, {}};
    for (auto v : out.scope) out.values.push_back(x.at(v));
    return out;
}

inline JointAssignment merge(const JointAssignment& a, const JointAssignment& b) {
    JointAssignment out{a.scope | b.scope, {}};
    for (auto v : out.scope) out.values.push_back(a.scope.contains(v) ? a.at(v) : b.at(v));
    return out;
}

} // namespace credal
