#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "credal/bracketing.hpp"
#include "credal/errors.hpp"
#include "credal/global_lp.hpp"
#include "credal/graph.hpp"
#include "credal/local_models.hpp"
#include "credal/network.hpp"

namespace credal {

enum class ReductionKind { marginalisation, iterated, factorisation, additivity, atom, local, lp };

inline const char* to_string(ReductionKind k) {
    switch (k) {
    case ReductionKind::marginalisation: return "marginalisation";
    case ReductionKind::iterated: return "iterated";
    case ReductionKind::factorisation: return "factorisation";
    case ReductionKind::additivity: return "additivity";
    case ReductionKind::atom: return "atom";
    case ReductionKind::local: return "local";
    case ReductionKind::lp: return "lp";
    }
    return "?";
}

/// One certified step of a computation. Steps appear in pre-order; `depth`
/// gives the nesting.
struct Reduction {
    ReductionKind kind;
    int depth = 0;
    std::string premise;
    double value = 0.0;
};

using Trace = std::vector<Reduction>;

inline void write_trace(std::ostream& os, const Trace& t) {
    for (auto& r : t)
        os << "step depth=" << r.depth << " kind=" << to_string(r.kind) << " value=" << r.value
           << (r.premise.empty() ? "" : " ") << r.premise << "\n";
}

/// Which engine answers unconditional sub-problems.
enum class Engine { lp, planner };

namespace detail {

class TraceScope {
public:
    TraceScope(Trace* t, ReductionKind kind, int depth, std::string premise) : t_(t) {
        if (t_) {
            idx_ = t_->size();
            t_->push_back({kind, depth, std::move(premise), 0.0});
        }
    }
    double done(double v) {
        if (t_) (*t_)[idx_].value = v;
        return v;
    }

private:
    Trace* t_;
    std::size_t idx_ = 0;
};

} // namespace detail

inline double lower_expectation(const CredalNetwork& net, const Factor& f, Engine engine = Engine::planner,
                         Trace* trace = nullptr, int depth = 0);

inline double upper_expectation(const CredalNetwork& net, const Factor& f, Engine engine = Engine::planner,
                                Trace* trace = nullptr, int depth = 0) {
    return -lower_expectation(net, -f, engine, trace, depth);
}

namespace detail {

// The smallest set S, grown from `seed`, such that every node outside S is an
// ancestor of every node inside S.
inline NodeSet precedence_closure(const std::vector<std::vector<bool>>& anc, NodeId seed) {
    const std::size_t n = anc.size();
    std::vector<bool> in(n, false);
    std::vector<NodeId> stack{seed};
    in[seed] = true;
    while (!stack.empty()) {
        NodeId s = stack.back();
        stack.pop_back();
        for (NodeId v = 0; v < n; ++v)
            if (!in[v] && v != s && !anc[s][v]) {
                in[v] = true;
                stack.push_back(v);
            }
    }
    return NodeSet::from_mask(in);
}

inline bool precedes_all(const Dag& dag, const NodeSet& T, const NodeSet& S) {
    for (auto s : S) {
        auto up = dag.reach_up(NodeSet{s});
        for (auto t : T)
            if (!up[t]) return false;
    }
    return true;
}

// Inner factor of the law of iterated lower expectation: a function of the
// T-nodes f depends on, plus the parents of S.
inline Factor iterated_inner(const CredalNetwork& net, const NodeSet& S, const Factor& f, Engine engine,
                             Trace* trace, int depth) {
    const Dag& dag = net.dag();
    NodeSet T = dag.all() - S;
    auto rel = set_relations(dag, S);
    NodeSet scope = (f.scope & T) | rel.parents;
    Factor h = Factor::zeros(net, scope);
    std::map<std::vector<std::size_t>, CredalNetwork> subs;
    std::size_t i = 0;
    for (StateCounter it(h.cards); !it.done(); it.next(), ++i) {
        JointAssignment y{scope, it.values()};
        Factor inner = restrict_factor(f, y);
        if (S.size() == 1) {
            NodeId s = S[0];
            const CredalSet& m = net.local(s, net.config_of(s, [&](NodeId p) { return y.at(p); }));
            h.table[i] = local_lower_expectation(m, extend(net, inner, S).table);
            continue;
        }
        JointAssignment xpa = project(y, rel.parents);
        auto found = subs.find(xpa.values);
        if (found == subs.end()) found = subs.emplace(xpa.values, sub_network(net, S, xpa)).first;
        const CredalNetwork& sub = found->second;
        h.table[i] = lower_expectation(sub, translate(inner, net, sub), engine, trace, depth);
    }
    return h;
}

// Splits a factor as a table over (scope ∩ K) × (scope ∩ rest).
struct Split {
    std::vector<std::vector<double>> m;  // m[a][b]
    NodeSet a_scope, b_scope;
};

inline Split split_table(const CredalNetwork& net, const Factor& f, const NodeSet& K) {
    Split sp;
    sp.a_scope = f.scope & K;
    sp.b_scope = f.scope - K;
    auto ac = net.cards(sp.a_scope), bc = net.cards(sp.b_scope);
    std::size_t na = checked_product(ac), nb = checked_product(bc);
    sp.m.assign(na, std::vector<double>(nb, 0.0));
    std::vector<std::size_t> full(f.scope.size());
    std::size_t a = 0;
    for (StateCounter ia(ac); !ia.done(); ia.next(), ++a) {
        std::size_t b = 0;
        for (StateCounter ib(bc); !ib.done(); ib.next(), ++b) {
            for (std::size_t k = 0; k < sp.a_scope.size(); ++k) full[f.scope.position(sp.a_scope[k])] = ia.values()[k];
            for (std::size_t k = 0; k < sp.b_scope.size(); ++k) full[f.scope.position(sp.b_scope[k])] = ib.values()[k];
            sp.m[a][b] = f.table[f.index(full)];
        }
    }
    return sp;
}

inline double structure_tol(const Factor& f) {
    return 1e-12 * (1.0 + std::max(std::fabs(f.min()), std::fabs(f.max())));
}

// f = u(a)·λ(b) with λ >= 0? Returns the pair when it holds.
inline bool rank_one_nonneg(const Split& sp, double tol, std::vector<double>& u, std::vector<double>& lam) {
    const std::size_t na = sp.m.size(), nb = sp.m[0].size();
    std::size_t ba = 0, bb = 0;
    double best = -1.0;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b)
            if (std::fabs(sp.m[a][b]) > best) {
                best = std::fabs(sp.m[a][b]);
                ba = a;
                bb = b;
            }
    u.assign(na, 0.0);
    lam.assign(nb, 0.0);
    if (best <= tol) return true;  // f vanishes
    for (std::size_t b = 0; b < nb; ++b) lam[b] = sp.m[ba][b] / sp.m[ba][bb];
    for (std::size_t a = 0; a < na; ++a) u[a] = sp.m[a][bb];
    for (double l : lam)
        if (l < -tol) return false;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b)
            if (std::fabs(sp.m[a][b] - u[a] * lam[b]) > tol) return false;
    for (double& l : lam) l = std::max(l, 0.0);
    return true;
}

inline std::vector<NodeSet> weak_components(const Dag& dag) {
    const std::size_t n = dag.size();
    std::vector<int> comp(n, -1);
    std::vector<NodeSet> out;
    for (NodeId v = 0; v < n; ++v) {
        if (comp[v] >= 0) continue;
        int id = static_cast<int>(out.size());
        std::vector<NodeId> members, stack{v};
        comp[v] = id;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            members.push_back(u);
            for (auto w : dag.parents(u))
                if (comp[w] < 0) { comp[w] = id; stack.push_back(w); }
            for (auto w : dag.children(u))
                if (comp[w] < 0) { comp[w] = id; stack.push_back(w); }
        }
        out.emplace_back(std::move(members));
    }
    return out;
}

inline double planner_lower(const CredalNetwork& net, const Factor& f, Trace* trace, int depth) {
    const Dag& dag = net.dag();
    if (f.scope.empty() || f.min() == f.max()) return f.table[0];

    // Marginalise onto the ancestral closure of the factor's scope.
    NodeSet A = ancestral_closure(dag, f.scope);
    if (A.size() < dag.size()) {
        TraceScope ts(trace, ReductionKind::marginalisation, depth, "K=" + net.describe(A) + " parents={}");
        auto sub = sub_network(net, A, JointAssignment{});
        return ts.done(lower_expectation(sub, translate(f, net, sub), Engine::planner, trace, depth + 1));
    }
    if (dag.size() == 1) {
        TraceScope ts(trace, ReductionKind::local, depth, "node=" + net.name(0));
        return ts.done(local_lower_expectation(net.local(0, 0), extend(net, f, NodeSet{0}).table));
    }

    // Law of iterated lower expectation on the smallest peelable S.
    {
        std::vector<std::vector<bool>> anc(dag.size());
        for (NodeId v = 0; v < dag.size(); ++v) anc[v] = dag.reach_up(NodeSet{v});
        NodeSet best;
        for (NodeId v = dag.size(); v-- > 0;) {
            if (!dag.children(v).empty()) continue;
            NodeSet S = precedence_closure(anc, v);
            if (S.size() < dag.size() && (best.empty() || S.size() < best.size())) best = S;
        }
        if (!best.empty()) {
            NodeSet T = dag.all() - best;
            TraceScope ts(trace, ReductionKind::iterated, depth, "S=" + net.describe(best) + " T=" + net.describe(T));
            Factor h = iterated_inner(net, best, f, Engine::planner, trace, depth + 1);
            auto outer = sub_network(net, T, JointAssignment{});
            return ts.done(lower_expectation(outer, translate(h, net, outer), Engine::planner, trace, depth + 1));
        }
    }

    // Disconnected pieces: additive or multiplicative separation.
    auto comps = weak_components(dag);
    if (comps.size() > 1) {
        const NodeSet& K = comps[0];
        NodeSet R = dag.all() - K;
        auto sp = split_table(net, f, K);
        double tol = structure_tol(f);
        const std::size_t na = sp.m.size(), nb = sp.m[0].size();
        bool additive = true;
        for (std::size_t a = 0; a < na && additive; ++a)
            for (std::size_t b = 0; b < nb; ++b)
                if (std::fabs(sp.m[a][b] - sp.m[a][0] - sp.m[0][b] + sp.m[0][0]) > tol) {
                    additive = false;
                    break;
                }
        auto subK = sub_network(net, K, JointAssignment{});
        auto subR = sub_network(net, R, JointAssignment{});
        auto on = [&](const CredalNetwork& sub, const NodeSet& scope, std::vector<double> t) {
            return translate(Factor::on(net, scope, std::move(t)), net, sub);
        };
        if (additive) {
            TraceScope ts(trace, ReductionKind::additivity, depth, "K=" + net.describe(K) + " NN=" + net.describe(R));
            std::vector<double> fa(na), hb(nb);
            for (std::size_t a = 0; a < na; ++a) fa[a] = sp.m[a][0];
            for (std::size_t b = 0; b < nb; ++b) hb[b] = sp.m[0][b] - sp.m[0][0];
            double ek = lower_expectation(subK, on(subK, sp.a_scope, fa), Engine::planner, trace, depth + 1);
            double er = lower_expectation(subR, on(subR, sp.b_scope, hb), Engine::planner, trace, depth + 1);
            return ts.done(ek + er);
        }
        std::vector<double> u, lam;
        if (rank_one_nonneg(sp, tol, u, lam)) {
            TraceScope ts(trace, ReductionKind::factorisation, depth, "K=" + net.describe(K) + " g-on=" + net.describe(R));
            double ek = lower_expectation(subK, on(subK, sp.a_scope, u), Engine::planner, trace, depth + 1);
            Factor g = on(subR, sp.b_scope, lam);
            double eg = ek >= 0.0 ? lower_expectation(subR, g, Engine::planner, trace, depth + 1)
                                  : upper_expectation(subR, g, Engine::planner, trace, depth + 1);
            return ts.done(ek * eg);
        }
        // Transposed orientation: non-negative co-factor on K.
        Split tr;
        tr.a_scope = sp.b_scope;
        tr.b_scope = sp.a_scope;
        tr.m.assign(nb, std::vector<double>(na));
        for (std::size_t a = 0; a < na; ++a)
            for (std::size_t b = 0; b < nb; ++b) tr.m[b][a] = sp.m[a][b];
        if (rank_one_nonneg(tr, tol, u, lam)) {
            TraceScope ts(trace, ReductionKind::factorisation, depth, "K=" + net.describe(R) + " g-on=" + net.describe(K));
            double er = lower_expectation(subR, on(subR, tr.a_scope, u), Engine::planner, trace, depth + 1);
            Factor g = on(subK, tr.b_scope, lam);
            double eg = er >= 0.0 ? lower_expectation(subK, g, Engine::planner, trace, depth + 1)
                                  : upper_expectation(subK, g, Engine::planner, trace, depth + 1);
            return ts.done(er * eg);
        }
    }

    TraceScope ts(trace, ReductionKind::lp, depth, "nodes=" + net.describe(dag.all()));
    return ts.done(lower_expectation_lp(net, f));
}

} // namespace detail

/// Unconditional lower expectation by the chosen engine. The planner applies
/// marginalisation, iterated expectation and factorisation greedily and falls
/// back to the global program on what remains.
inline double lower_expectation(const CredalNetwork& net, const Factor& f, Engine engine, Trace* trace, int depth) {
    if (engine == Engine::lp) {
        detail::TraceScope ts(trace, ReductionKind::lp, depth, "nodes=" + net.describe(net.dag().all()));
        return ts.done(lower_expectation_lp(net, f));
    }
    return detail::planner_lower(net, f, trace, depth);
}

inline RhoEvaluator make_rho(const CredalNetwork& net, const Factor& f, const Event& B, Engine engine = Engine::planner) {
    if (B.empty()) throw InputError("conditioning event is empty");
    NodeSet U = f.scope | B.scope;
    auto ff = extend(net, f, U);
    auto ib = extend(net, B.indicator(), U);
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < ff.table.size(); ++i)
        if (ib.table[i] > 0.0) {
            lo = any ? std::min(lo, ff.table[i]) : ff.table[i];
            hi = any ? std::max(hi, ff.table[i]) : ff.table[i];
            any = true;
        }
    return RhoEvaluator(
        [net, ff, ib, engine](double mu) {
            Factor g = ff;
            for (std::size_t i = 0; i < g.table.size(); ++i) g.table[i] = ib.table[i] * (ff.table[i] - mu);
            return lower_expectation(net, g, engine);
        },
        lo, hi);
}

namespace detail {

inline void require_closed(const Dag& dag, const NodeSet& K) {
    if (!is_closed(dag, K)) throw HypothesisError("node set is not closed");
}

inline void require_assigned(const CredalNetwork& net, const NodeSet& P, const JointAssignment& x) {
    for (auto p : P)
        if (!x.scope.contains(p)) throw InputError("parent '" + net.name(p) + "' is not assigned");
}

} // namespace detail

/// Conditional lower expectation of f(X_K) given (B_K, x_P(K), B_NN(K)),
/// computed in the sub-network on K.
inline double marginalise(const CredalNetwork& net, const NodeSet& K, const JointAssignment& x_paK, const Factor& f,
                          const Event& B_K, const Event& B_NNK, Engine engine = Engine::planner,
                          Trace* trace = nullptr, double tol = default_bracket_tolerance) {
    const Dag& dag = net.dag();
    detail::require_closed(dag, K);
    auto rel = set_relations(dag, K);
    detail::require_assigned(net, rel.parents, x_paK);
    if (!f.scope.subset_of(K)) throw InputError("factor must live on K");
    if (!B_K.scope.subset_of(K)) throw InputError("B_K must live on K");
    if (!B_NNK.scope.subset_of(rel.non_parent_non_descendants)) throw InputError("B_NN must live on NN(K)");
    if (B_K.empty() || B_NNK.empty()) throw InputError("conditioning event is empty");
    detail::TraceScope ts(trace, ReductionKind::marginalisation, 0,
                          "K=" + net.describe(K) + " parents={" + net.describe(project(x_paK, rel.parents)) + "}");
    auto sub = sub_network(net, K, project(x_paK, rel.parents));
    Factor g = translate(f, net, sub);
    if (B_K.is_sure()) return ts.done(lower_expectation(sub, g, engine, trace, 1));
    auto ev = make_rho(sub, g, translate(B_K, net, sub), engine);
    return ts.done(natural_conditional(ev, tol).value);
}

/// E_G(f) = E_T(E_{S|x_pa(S)}(f)) when every node of T = G \ S precedes every node of S.
inline double iterated_lower_expectation(const CredalNetwork& net, const NodeSet& S, const Factor& f,
                                         Engine engine = Engine::planner, Trace* trace = nullptr) {
    const Dag& dag = net.dag();
    dag.check(S);
    if (S.empty()) return lower_expectation(net, f, engine, trace);
    NodeSet T = dag.all() - S;
    if (!detail::precedes_all(dag, T, S)) throw HypothesisError("precedence hypothesis fails for S");
    detail::TraceScope ts(trace, ReductionKind::iterated, 0, "S=" + net.describe(S) + " T=" + net.describe(T));
    Factor h = detail::iterated_inner(net, S, f, engine, trace, 1);
    if (T.empty()) return ts.done(h.table[0]);
    auto outer = sub_network(net, T, JointAssignment{});
    return ts.done(lower_expectation(outer, translate(h, net, outer), engine, trace, 1));
}

/// Lower expectation of g(X_NN(K))·I_{x_paK}(X_P(K))·f(X_K) for g >= 0.
inline double factorise(const CredalNetwork& net, const NodeSet& K, const JointAssignment& x_paK, const Factor& f,
                        const Factor& g, Engine engine = Engine::planner, Trace* trace = nullptr) {
    const Dag& dag = net.dag();
    detail::require_closed(dag, K);
    auto rel = set_relations(dag, K);
    detail::require_assigned(net, rel.parents, x_paK);
    if (!f.scope.subset_of(K)) throw InputError("factor must live on K");
    if (!g.scope.subset_of(rel.non_parent_non_descendants)) throw InputError("co-factor must live on NN(K)");
    if (g.min() < 0.0) throw HypothesisError("co-factor is negative somewhere");
    JointAssignment xp = project(x_paK, rel.parents);
    detail::TraceScope ts(trace, ReductionKind::factorisation, 0,
                          "K=" + net.describe(K) + " parents={" + net.describe(xp) + "}");
    auto sub = sub_network(net, K, xp);
    double ek = lower_expectation(sub, translate(f, net, sub), engine, trace, 1);
    // Co-factor g·I_{x_paK} on the ancestral set N(K).
    const NodeSet& N = rel.non_descendants;
    Factor ind = Event::cylinder_of(net, xp).indicator();
    Factor co = combine(net, g, ind, [](double a, double b) { return a * b; });
    auto nsub = sub_network(net, N, JointAssignment{});
    Factor con = translate(co, net, nsub);
    double e = ek >= 0.0 ? lower_expectation(nsub, con, engine, trace, 1) : upper_expectation(nsub, con, engine, trace, 1);
    return ts.done(ek * e);
}

/// E_G(h(X_NN(K)) + f(X_K)) = E_NN(K)(h) + E_K(f) when P(K) is empty.
inline double external_additivity(const CredalNetwork& net, const NodeSet& K, const Factor& f, const Factor& h,
                                  Engine engine = Engine::planner, Trace* trace = nullptr) {
    const Dag& dag = net.dag();
    detail::require_closed(dag, K);
    auto rel = set_relations(dag, K);
    if (!rel.parents.empty()) throw HypothesisError("K has parents outside K");
    if (!f.scope.subset_of(K)) throw InputError("factor must live on K");
    if (!h.scope.subset_of(rel.non_parent_non_descendants)) throw InputError("h must live on NN(K)");
    detail::TraceScope ts(trace, ReductionKind::additivity, 0, "K=" + net.describe(K));
    auto subK = sub_network(net, K, JointAssignment{});
    double ek = lower_expectation(subK, translate(f, net, subK), engine, trace, 1);
    double en = h.table[0];
    if (!rel.non_parent_non_descendants.empty()) {
        auto subN = sub_network(net, rel.non_parent_non_descendants, JointAssignment{});
        en = lower_expectation(subN, translate(h, net, subN), engine, trace, 1);
    } else if (!h.scope.empty()) {
        throw InputError("h must live on NN(K)");
    }
    return ts.done(en + ek);
}

/// E_G(h + g·I_{x_paK}·f) with f replaced by its sub-network lower expectation.
inline double combined(const CredalNetwork& net, const NodeSet& K, const JointAssignment& x_paK, const Factor& f,
                       const Factor& h, const Factor& g, Engine engine = Engine::planner, Trace* trace = nullptr) {
    const Dag& dag = net.dag();
    detail::require_closed(dag, K);
    auto rel = set_relations(dag, K);
    detail::require_assigned(net, rel.parents, x_paK);
    if (!f.scope.subset_of(K)) throw InputError("factor must live on K");
    if (!h.scope.subset_of(rel.non_descendants)) throw InputError("h must live on N(K)");
    if (!g.scope.subset_of(rel.non_parent_non_descendants)) throw InputError("g must live on NN(K)");
    if (g.min() < 0.0) throw HypothesisError("co-factor is negative somewhere");
    JointAssignment xp = project(x_paK, rel.parents);
    detail::TraceScope ts(trace, ReductionKind::factorisation, 0,
                          "combined K=" + net.describe(K) + " parents={" + net.describe(xp) + "}");
    auto sub = sub_network(net, K, xp);
    double ek = lower_expectation(sub, translate(f, net, sub), engine, trace, 1);
    Factor ind = Event::cylinder_of(net, xp).indicator();
    Factor gi = combine(net, g, ind, [ek](double a, double b) { return a * b * ek; });
    Factor total = combine(net, h, gi, [](double a, double b) { return a + b; });
    const NodeSet& N = rel.non_descendants;
    if (N.empty()) return ts.done(total.table[0]);
    auto nsub = sub_network(net, N, JointAssignment{});
    return ts.done(lower_expectation(nsub, translate(total, net, nsub), engine, trace, 1));
}

struct AtomBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Lower and upper probability of a full joint state as products of local bounds.
inline AtomBounds atom_bounds(const CredalNetwork& net, const JointAssignment& x) {
    if (!(x.scope == net.dag().all())) throw InputError("atom bounds need a full joint assignment");
    AtomBounds b{1.0, 1.0};
    for (NodeId s = 0; s < net.size(); ++s) {
        const CredalSet& m = net.local_given(s, x);
        b.lower *= local_lower_probability(m, {x.at(s)});
        b.upper *= local_upper_probability(m, {x.at(s)});
    }
    return b;
}

} // namespace credal
