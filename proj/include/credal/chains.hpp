#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "credal/bracketing.hpp"
#include "credal/errors.hpp"
#include "credal/local_models.hpp"
#include "credal/network.hpp"

namespace credal {

/// Nodes of a simple chain from root to leaf, or nothing if the graph is not one.
inline std::optional<std::vector<NodeId>> chain_order(const Dag& dag) {
    const std::size_t n = dag.size();
    if (n == 0) return std::nullopt;
    std::optional<NodeId> root;
    for (NodeId v = 0; v < n; ++v) {
        if (dag.parents(v).size() > 1 || dag.children(v).size() > 1) return std::nullopt;
        if (dag.parents(v).empty()) {
            if (root) return std::nullopt;
            root = v;
        }
    }
    if (!root) return std::nullopt;
    std::vector<NodeId> order{*root};
    while (!dag.children(order.back()).empty()) order.push_back(dag.children(order.back())[0]);
    if (order.size() != n) return std::nullopt;
    return order;
}

inline std::vector<NodeId> require_chain(const CredalNetwork& net) {
    auto order = chain_order(net.dag());
    if (!order) throw HypothesisError("network is not a simple chain");
    return *order;
}

/// x_{k-1} ↦ lower expectation of g under M_{k|x_{k-1}}.
inline std::vector<double> transfer(const CredalNetwork& net, NodeId k, const std::vector<double>& g) {
    std::vector<double> out(net.config_count(k));
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = local_lower_expectation(net.local(k, c), g);
    return out;
}

inline std::vector<double> transfer_upper(const CredalNetwork& net, NodeId k, const std::vector<double>& g) {
    std::vector<double> neg(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -g[i];
    auto t = transfer(net, k, neg);
    for (double& x : t) x = -x;
    return t;
}

/// Lower expectation of h(X_n) on a chain by backward transfer operators.
inline double chain_forward(const CredalNetwork& net, const Factor& h) {
    auto order = require_chain(net);
    NodeId last = order.back();
    if (!h.scope.subset_of(NodeSet{last})) throw InputError("chain_forward needs a factor on the last node");
    std::vector<double> g = extend(net, h, NodeSet{last}).table;
    for (std::size_t i = order.size() - 1; i >= 1; --i) g = transfer(net, order[i], g);
    return local_lower_expectation(net.local(order[0], 0), g);
}

/// ρ(μ) for I_{x_n}(X_n)·(h(X_1) − μ) on a chain, in one backward pass.
inline double chain_reverse_rho(const CredalNetwork& net, const Factor& h, std::size_t x_n, double mu) {
    auto order = require_chain(net);
    NodeId first = order.front(), last = order.back();
    if (!h.scope.subset_of(NodeSet{first})) throw InputError("chain_reverse_rho needs a factor on the first node");
    if (x_n >= net.card(last)) throw InputError("terminal state out of range");
    std::vector<double> lo(net.card(last), 0.0);
    lo[x_n] = 1.0;
    std::vector<double> up = lo;
    for (std::size_t i = order.size() - 1; i >= 1; --i) {
        lo = transfer(net, order[i], lo);
        up = transfer_upper(net, order[i], up);
    }
    auto hv = extend(net, h, NodeSet{first}).table;
    std::vector<double> g(hv.size());
    for (std::size_t x = 0; x < hv.size(); ++x) {
        double d = hv[x] - mu;
        g[x] = (hv[x] >= mu ? lo[x] : up[x]) * d;
    }
    return local_lower_expectation(net.local(first, 0), g);
}

/// State nodes s_1..s_{n+1} and observation nodes o_1..o_n of an (order 1 or
/// 2) imprecise hidden Markov model.
struct HmmSpec {
    std::vector<NodeId> states;
    std::vector<NodeId> observations;
    int order = 1;
};

/// Checks that the network has exactly the HMM shape described by the names.
inline HmmSpec make_hmm(const CredalNetwork& net, const std::vector<std::string>& states,
                        const std::vector<std::string>& observations, int order = 1) {
    if (order != 1 && order != 2) throw HypothesisError("hidden Markov model order must be 1 or 2");
    if (states.size() != observations.size() + 1 || observations.empty())
        throw HypothesisError("hidden Markov model needs n observations and n+1 states");
    HmmSpec spec;
    spec.order = order;
    for (auto& s : states) spec.states.push_back(net.index(s));
    for (auto& o : observations) spec.observations.push_back(net.index(o));
    std::set<NodeId> all(spec.states.begin(), spec.states.end());
    all.insert(spec.observations.begin(), spec.observations.end());
    if (all.size() != net.size()) throw HypothesisError("hidden Markov model must cover every node exactly once");
    std::set<std::pair<NodeId, NodeId>> want;
    for (std::size_t k = 0; k + 1 < spec.states.size(); ++k) want.emplace(spec.states[k], spec.states[k + 1]);
    if (order == 2)
        for (std::size_t k = 0; k + 2 < spec.states.size(); ++k) want.emplace(spec.states[k], spec.states[k + 2]);
    for (std::size_t k = 0; k < spec.observations.size(); ++k) want.emplace(spec.states[k], spec.observations[k]);
    auto have = net.dag().edges();
    std::set<std::pair<NodeId, NodeId>> got(have.begin(), have.end());
    if (got != want) throw HypothesisError("graph does not have the hidden Markov model shape");
    return spec;
}

/// Backward recursion for ρ(μ) with B the observation sequence and f on
/// s_{n+1}. f = 1, μ = 0 gives the lower probability of the observations.
inline double hmm_forward_rho(const CredalNetwork& net, const HmmSpec& spec, const Factor& f,
                              const std::vector<std::size_t>& obs, double mu) {
    const std::size_t n = spec.observations.size();
    if (obs.size() != n) throw InputError("one observed state per observation node is required");
    NodeId last = spec.states.back();
    if (!f.scope.subset_of(NodeSet{last})) throw InputError("HMM target must be a factor on the last state node");
    std::vector<double> fm = extend(net, f, NodeSet{last}).table;
    for (double& x : fm) x -= mu;

    const Dag& dag = net.dag();
    std::vector<double> h(net.config_count(last));
    for (std::size_t c = 0; c < h.size(); ++c) h[c] = local_lower_expectation(net.local(last, c), fm);

    for (std::size_t k = n; k-- > 0;) {
        NodeId s = spec.states[k], next = spec.states[k + 1], o = spec.observations[k];
        if (obs[k] >= net.card(o)) throw InputError("observed state out of range");
        // Observation weights for each value of s_k.
        std::vector<double> p_lo(net.card(s)), p_up(net.card(s));
        for (std::size_t x = 0; x < net.card(s); ++x) {
            p_lo[x] = local_lower_probability(net.local(o, x), {obs[k]});
            p_up[x] = local_upper_probability(net.local(o, x), {obs[k]});
        }
        auto& pa = dag.parents(s);
        std::vector<double> hk(net.config_count(s));
        std::vector<double> w(net.card(s));
        for (std::size_t c = 0; c < hk.size(); ++c) {
            auto pv = net.config_values(s, c);
            for (std::size_t x = 0; x < net.card(s); ++x) {
                std::size_t cn = net.config_of(next, [&](NodeId p) {
                    if (p == s) return x;
                    auto it = std::find(pa.begin(), pa.end(), p);
                    return pv[static_cast<std::size_t>(it - pa.begin())];
                });
                double hv = h[cn];
                w[x] = hv * (hv >= 0.0 ? p_lo[x] : p_up[x]);
            }
            hk[c] = local_lower_expectation(net.local(s, c), w);
        }
        h = std::move(hk);
    }
    return h[0];
}

/// Lower (or regular) conditional of f(X_q) given every other node.
inline BracketResult complete_evidence_lower(const CredalNetwork& net, NodeId q, const JointAssignment& x_E,
                                             const Factor& f, bool regular, double tol = default_bracket_tolerance) {
    const Dag& dag = net.dag();
    if (!f.scope.subset_of(NodeSet{q})) throw InputError("target must be a factor on the queried node");
    if (!(dag.all() - NodeSet{q}).subset_of(x_E.scope) || x_E.scope.contains(q))
        throw InputError("evidence must assign every node except the queried one");
    auto fv = extend(net, f, NodeSet{q}).table;
    const std::size_t k = net.card(q);
    auto value_with = [&](std::size_t xq) {
        return [&, xq](NodeId p) { return p == q ? xq : x_E.at(p); };
    };
    const CredalSet& mq = net.local(q, net.config_of(q, value_with(0)));
    if (dag.children(q).empty()) {
        BracketResult r;
        r.value = local_lower_expectation(mq, fv);
        r.kind = BracketKind::local_fallback;
        return r;
    }
    auto desc = dag.descendants(q);
    std::vector<double> lo_prod(k, 1.0), up_prod(k, 1.0);
    for (std::size_t xq = 0; xq < k; ++xq)
        for (auto s : desc) {
            const CredalSet& m = net.local(s, net.config_of(s, value_with(xq)));
            lo_prod[xq] *= local_lower_probability(m, {x_E.at(s)});
            up_prod[xq] *= local_upper_probability(m, {x_E.at(s)});
        }
    RhoEvaluator ev(
        [&, fv, lo_prod, up_prod](double mu) {
            std::vector<double> g(fv.size());
            for (std::size_t x = 0; x < fv.size(); ++x)
                g[x] = (fv[x] - mu) * (fv[x] >= mu ? lo_prod[x] : up_prod[x]);
            return local_lower_expectation(mq, g);
        },
        *std::min_element(fv.begin(), fv.end()), *std::max_element(fv.begin(), fv.end()));
    if (!regular) return natural_conditional(ev, tol);
    // Upper probability of the evidence on the non-descendants of q.
    double gate = 1.0;
    for (NodeId s = 0; s < net.size(); ++s) {
        if (s == q || desc.contains(s)) continue;
        const CredalSet& m = net.local(s, net.config_of(s, value_with(0)));
        gate *= local_upper_probability(m, {x_E.at(s)});
    }
    if (gate > 0.0) return regular_conditional(ev, tol);
    if (lower_prob_positive(ev)) return natural_conditional(ev, tol);
    BracketResult r;
    r.value = ev.min_f();
    r.kind = BracketKind::vacuous_fallback;
    return r;
}

} // namespace credal
