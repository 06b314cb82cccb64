#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credal/bracketing.hpp"
#include "credal/chains.hpp"
#include "credal/decompose.hpp"
#include "credal/errors.hpp"
#include "credal/network.hpp"

namespace credal {

enum class Rule { natural, regular, unconditional };
enum class Method { automatic, lp, decompose, chain, hmm };

inline const char* to_string(Rule r) {
    switch (r) {
    case Rule::natural: return "natural";
    case Rule::regular: return "regular";
    case Rule::unconditional: return "unconditional";
    }
    return "?";
}

inline const char* to_string(Method m) {
    switch (m) {
    case Method::automatic: return "auto";
    case Method::lp: return "lp";
    case Method::decompose: return "decompose";
    case Method::chain: return "chain";
    case Method::hmm: return "hmm";
    }
    return "?";
}

/// Bracketing on the full network, without structural reduction.
inline BracketResult direct_condition(const CredalNetwork& net, const Factor& f, const Event& B, Rule rule,
                                      Engine engine = Engine::planner, double tol = default_bracket_tolerance) {
    if (B.empty()) throw InputError("conditioning event is empty");
    if (B.is_sure() || rule == Rule::unconditional) {
        BracketResult r;
        r.value = lower_expectation(net, f, engine);
        r.kind = BracketKind::local_fallback;
        return r;
    }
    auto ev = make_rho(net, f, B, engine);
    return rule == Rule::natural ? natural_conditional(ev, tol) : regular_conditional(ev, tol);
}

/// Smallest closed K containing the scope of f whose outside parents are all
/// observed and none of whose descendants are observed.
inline NodeSet conditioning_block(const Dag& dag, const NodeSet& scope, const NodeSet& observed) {
    NodeSet K = scope;
    for (;;) {
        NodeSet next = closure(dag, K);
        auto rel = set_relations(dag, next);
        next = next | (rel.parents - observed) | (rel.descendants & observed);
        if (next == K) return K;
        K = next;
    }
}

/// Conditional lower expectation given a cylinder event, computed in the
/// sub-network of the smallest admissible closed K. For the regular rule the
/// upper probability of the evidence outside K decides between the regular
/// and the natural conditional inside K.
inline BracketResult reduce_then_condition(const CredalNetwork& net, const Factor& f, const Event& B, Rule rule,
                                           Engine engine = Engine::planner, double tol = default_bracket_tolerance,
                                           Trace* trace = nullptr) {
    if (B.empty()) throw InputError("conditioning event is empty");
    if (rule == Rule::unconditional || B.is_sure()) return direct_condition(net, f, B, Rule::unconditional, engine, tol);
    if (!B.cylinder) return direct_condition(net, f, B, rule, engine, tol);
    const Dag& dag = net.dag();
    JointAssignment x = B.as_assignment();
    NodeSet K = conditioning_block(dag, f.scope, x.scope);
    if (K.empty()) {
        BracketResult r;
        r.value = f.table[0];
        r.kind = BracketKind::local_fallback;
        return r;
    }
    if (K == dag.all()) return direct_condition(net, f, B, rule, engine, tol);

    auto rel = set_relations(dag, K);
    JointAssignment x_pa = project(x, rel.parents);
    JointAssignment x_K = project(x, K);
    JointAssignment x_out = project(x, rel.non_descendants);
    detail::TraceScope ts(trace, ReductionKind::marginalisation, 0,
                          "K=" + net.describe(K) + " parents={" + net.describe(x_pa) + "} rule=" + to_string(rule));
    auto sub = sub_network(net, K, x_pa);
    Factor g = translate(f, net, sub);
    if (x_K.scope.empty()) {
        BracketResult r;
        r.value = ts.done(lower_expectation(sub, g, engine, trace, 1));
        r.kind = BracketKind::local_fallback;
        return r;
    }
    auto ev = make_rho(sub, g, Event::cylinder_of(sub, translate(x_K, net, sub)), engine);
    if (rule == Rule::natural) {
        auto r = natural_conditional(ev, tol);
        ts.done(r.value);
        return r;
    }
    double gate = 1.0;
    if (!x_out.scope.empty()) {
        if (ancestral_closure(dag, x_out.scope) == x_out.scope) {
            gate = 1.0;
            for (auto s : x_out.scope) gate *= local_upper_probability(net.local_given(s, x_out), {x_out.at(s)});
        } else {
            gate = upper_expectation(net, Event::cylinder_of(net, x_out).indicator(), engine);
        }
    }
    BracketResult r;
    if (gate > tau_sign) {
        r = regular_conditional(ev, tol);
    } else if (lower_prob_positive(ev)) {
        r = natural_conditional(ev, tol);
    } else {
        r.value = ev.min_f();
        r.kind = BracketKind::vacuous_fallback;
    }
    ts.done(r.value);
    return r;
}

struct HmmQuery {
    std::vector<std::string> states;
    std::vector<std::string> observations;
    int order = 1;
};

struct Query {
    Factor target;
    std::optional<Event> given;
    Rule rule = Rule::unconditional;
    Method method = Method::automatic;
    double tolerance = default_bracket_tolerance;
    std::optional<HmmQuery> hmm;
};

struct InferenceResult {
    double lower = 0.0;
    double upper = 0.0;
    Rule rule = Rule::unconditional;
    std::string method;
    std::optional<BracketResult> lower_bracket;
    std::optional<BracketResult> upper_bracket;
    Trace trace;
};

namespace detail {

inline BracketResult chain_conditional(const CredalNetwork& net, const Factor& f, const Event& B, Rule rule, double tol) {
    auto order = require_chain(net);
    if (!B.cylinder || !(B.scope == NodeSet{order.back()}))
        throw HypothesisError("chain conditioning needs evidence on the last node only");
    if (!f.scope.subset_of(NodeSet{order.front()}))
        throw HypothesisError("chain conditioning needs a target on the first node");
    std::size_t xn = B.as_assignment().values[0];
    auto fv = extend(net, f, NodeSet{order.front()});
    RhoEvaluator ev([&net, f, xn](double mu) { return chain_reverse_rho(net, f, xn, mu); }, fv.min(), fv.max());
    return rule == Rule::natural ? natural_conditional(ev, tol) : regular_conditional(ev, tol);
}

inline BracketResult hmm_conditional(const CredalNetwork& net, const HmmSpec& spec, const Factor& f, const Event& B,
                                     Rule rule, double tol) {
    NodeSet obs(spec.observations);
    if (!B.cylinder || !(B.scope == obs)) throw HypothesisError("HMM evidence must assign every observation node");
    auto x = B.as_assignment();
    std::vector<std::size_t> values;
    for (auto o : spec.observations) values.push_back(x.at(o));
    auto fv = extend(net, f, NodeSet{spec.states.back()});
    RhoEvaluator ev([&net, &spec, f, values](double mu) { return hmm_forward_rho(net, spec, f, values, mu); },
                    fv.min(), fv.max());
    return rule == Rule::natural ? natural_conditional(ev, tol) : regular_conditional(ev, tol);
}

// Lower conditional of f for one side of a query.
inline BracketResult one_side(const CredalNetwork& net, const Query& q, const Factor& f, Trace* trace,
                              std::string& method) {
    const bool conditional = q.rule != Rule::unconditional && q.given && !q.given->is_sure();
    switch (q.method) {
    case Method::lp:
        method = "lp";
        if (!conditional) {
            BracketResult r;
            r.value = lower_expectation(net, f, Engine::lp, trace);
            r.kind = BracketKind::local_fallback;
            return r;
        }
        return direct_condition(net, f, *q.given, q.rule, Engine::lp, q.tolerance);
    case Method::automatic:
    case Method::decompose:
        method = "decompose";
        if (!conditional) {
            BracketResult r;
            r.value = lower_expectation(net, f, Engine::planner, trace);
            r.kind = BracketKind::local_fallback;
            return r;
        }
        return reduce_then_condition(net, f, *q.given, q.rule, Engine::planner, q.tolerance, trace);
    case Method::chain: {
        method = "chain";
        if (!conditional) {
            BracketResult r;
            r.value = chain_forward(net, f);
            r.kind = BracketKind::local_fallback;
            return r;
        }
        return chain_conditional(net, f, *q.given, q.rule, q.tolerance);
    }
    case Method::hmm: {
        method = "hmm";
        if (!q.hmm) throw InputError("method hmm needs state and observation node lists");
        auto spec = make_hmm(net, q.hmm->states, q.hmm->observations, q.hmm->order);
        if (!conditional) throw HypothesisError("method hmm answers conditional queries only");
        return hmm_conditional(net, spec, f, *q.given, q.rule, q.tolerance);
    }
    }
    throw InputError("unknown method");
}

} // namespace detail

/// Lower and upper (by conjugacy) values of a query.
inline InferenceResult infer(const CredalNetwork& net, const Query& q) {
    if (q.given && q.given->empty()) throw InputError("conditioning event is empty");
    if (q.rule == Rule::unconditional && q.given && !q.given->is_sure())
        throw InputError("an unconditional query cannot carry a conditioning event");
    if (q.rule != Rule::unconditional && !q.given) throw InputError("a conditional query needs a conditioning event");
    InferenceResult out;
    out.rule = q.rule;
    auto lo = detail::one_side(net, q, q.target, &out.trace, out.method);
    auto up = detail::one_side(net, q, -q.target, nullptr, out.method);
    out.lower = lo.value;
    out.upper = -up.value;
    if (q.rule != Rule::unconditional) {
        out.lower_bracket = lo;
        out.upper_bracket = up;
    }
    return out;
}

} // namespace credal
