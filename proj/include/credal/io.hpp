#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "credal/conditioning.hpp"
#include "credal/errors.hpp"
#include "credal/network.hpp"
#include "credal/numeric.hpp"

namespace credal {

using Json = nlohmann::ordered_json;

namespace detail {

inline double json_number(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        try {
            return parse_probability(j.get<std::string>());
        } catch (const Error&) {
            throw InputError(where + ": cannot parse number '" + j.get<std::string>() + "'");
        }
    }
    throw InputError(where + ": expected a number or a numeric string");
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw InputError(where + ": missing field '" + key + "'");
    return *it;
}

inline std::string json_string(const Json& j, const std::string& where) {
    if (!j.is_string()) throw InputError(where + ": expected a string");
    return j.get<std::string>();
}

inline std::vector<std::string> string_list(const Json& j, const std::string& where) {
    if (!j.is_array()) throw InputError(where + ": expected a list of strings");
    std::vector<std::string> out;
    for (auto& e : j) out.push_back(json_string(e, where));
    return out;
}

inline std::vector<double> number_list(const Json& j, const std::string& where) {
    if (!j.is_array()) throw InputError(where + ": expected a list of numbers");
    std::vector<double> out;
    for (auto& e : j) out.push_back(json_number(e, where));
    return out;
}

inline Json number_list_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(format_number(x));
    return a;
}

inline Json parse_text(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(where + ": " + e.what());
    }
}

} // namespace detail

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- networks ---------------------------------------------------------------

inline NetworkDescription network_description_from_json(const Json& j) {
    NetworkDescription d;
    for (auto& n : detail::field(j, "nodes", "network")) {
        NodeSpec s;
        s.name = detail::json_string(detail::field(n, "name", "node"), "node name");
        s.states = detail::string_list(detail::field(n, "states", "node '" + s.name + "'"), "states of '" + s.name + "'");
        d.nodes.push_back(std::move(s));
    }
    if (auto it = j.find("edges"); it != j.end()) {
        if (!it->is_array()) throw InputError("edges: expected a list");
        for (auto& e : *it) {
            auto pair = detail::string_list(e, "edge");
            if (pair.size() != 2) throw InputError("edge: expected [parent, child]");
            d.edges.emplace_back(pair[0], pair[1]);
        }
    }
    if (auto it = j.find("locals"); it != j.end()) {
        if (!it->is_array()) throw InputError("locals: expected a list");
        for (auto& l : *it) {
            LocalSpec s;
            s.node = detail::json_string(detail::field(l, "node", "local"), "local node");
            std::string where = "local model of '" + s.node + "'";
            if (auto p = l.find("parents"); p != l.end()) {
                if (!p->is_object()) throw InputError(where + ": parents must be an object");
                for (auto& [k, v] : p->items()) s.parents[k] = detail::json_string(v, where);
            }
            if (auto v = l.find("vertices"); v != l.end()) {
                if (!v->is_array()) throw InputError(where + ": vertices must be a list");
                std::vector<MassFunction> vs;
                for (auto& p : *v) vs.push_back(detail::number_list(p, where));
                s.vertices = std::move(vs);
            }
            if (auto c = l.find("constraints"); c != l.end()) {
                if (!c->is_array()) throw InputError(where + ": constraints must be a list");
                std::vector<LinearConstraint> cs;
                for (auto& row : *c)
                    cs.push_back({detail::number_list(detail::field(row, "alpha", where), where),
                                  detail::json_number(detail::field(row, "beta", where), where)});
                s.constraints = std::move(cs);
            }
            if (!s.vertices && !s.constraints) throw InputError(where + ": needs vertices or constraints");
            d.locals.push_back(std::move(s));
        }
    }
    return d;
}

inline NetworkDescription parse_network_description(const std::string& text) {
    return network_description_from_json(detail::parse_text(text, "network"));
}

/// Canonical form: fixed key order, numbers as exact strings, locals sorted by
/// node declaration order and then parent configuration. Assumes validate()
/// reported no problems.
inline Json to_json(const NetworkDescription& d) {
    std::vector<std::string> names;
    for (auto& n : d.nodes) names.push_back(n.name);
    Dag dag(names, d.edges);
    auto state_pos = [&](NodeId v, const std::string& s) {
        auto& st = d.nodes[v].states;
        return static_cast<std::size_t>(std::find(st.begin(), st.end(), s) - st.begin());
    };
    auto sort_key = [&](const LocalSpec& l) {
        NodeId v = dag.index(l.node);
        std::vector<std::size_t> key{v};
        for (auto p : dag.parents(v)) key.push_back(state_pos(p, l.parents.at(names[p])));
        return key;
    };
    std::vector<const LocalSpec*> locals;
    for (auto& l : d.locals) locals.push_back(&l);
    std::stable_sort(locals.begin(), locals.end(),
                     [&](const LocalSpec* a, const LocalSpec* b) { return sort_key(*a) < sort_key(*b); });

    Json j;
    j["nodes"] = Json::array();
    for (auto& n : d.nodes) j["nodes"].push_back(Json{{"name", n.name}, {"states", n.states}});
    j["edges"] = Json::array();
    for (auto& [a, b] : dag.edges()) j["edges"].push_back(Json::array({names[a], names[b]}));
    j["locals"] = Json::array();
    for (auto* l : locals) {
        Json o;
        o["node"] = l->node;
        Json parents = Json::object();
        for (auto p : dag.parents(dag.index(l->node))) parents[names[p]] = l->parents.at(names[p]);
        o["parents"] = parents;
        if (l->vertices) {
            o["vertices"] = Json::array();
            for (auto& v : *l->vertices) o["vertices"].push_back(detail::number_list_json(v));
        }
        if (l->constraints) {
            o["constraints"] = Json::array();
            for (auto& c : *l->constraints)
                o["constraints"].push_back(Json{{"alpha", detail::number_list_json(c.alpha)}, {"beta", format_number(c.beta)}});
        }
        j["locals"].push_back(std::move(o));
    }
    return j;
}

inline std::string serialize(const NetworkDescription& d) { return to_json(d).dump(2) + "\n"; }

/// Description of a built network, one local per parent configuration, in the
/// representation the set was given in.
inline NetworkDescription describe_network(const CredalNetwork& net) {
    NetworkDescription d;
    for (NodeId v = 0; v < net.size(); ++v) d.nodes.push_back({net.name(v), net.states(v)});
    for (auto& [a, b] : net.dag().edges()) d.edges.emplace_back(net.name(a), net.name(b));
    for (NodeId v = 0; v < net.size(); ++v) {
        auto& pa = net.dag().parents(v);
        for (std::size_t c = 0; c < net.config_count(v); ++c) {
            LocalSpec l;
            l.node = net.name(v);
            auto vals = net.config_values(v, c);
            for (std::size_t i = 0; i < pa.size(); ++i) l.parents[net.name(pa[i])] = net.states(pa[i])[vals[i]];
            const CredalSet& m = net.local(v, c);
            if (m.constraints_given() && !m.vertices_given()) l.constraints = m.constraints();
            else l.vertices = m.vertices();
            d.locals.push_back(std::move(l));
        }
    }
    return d;
}

inline CredalNetwork parse_network(const std::string& text) { return build_network(parse_network_description(text)); }

inline CredalNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

// ---- queries ----------------------------------------------------------------

namespace detail {

// Node list in file order plus the positions that sort it into a NodeSet.
struct NamedScope {
    std::vector<NodeId> ids;
    NodeSet set;
};

inline NamedScope named_scope(const CredalNetwork& net, const Json& j, const std::string& where) {
    NamedScope s;
    for (auto& n : string_list(j, where)) s.ids.push_back(net.index(n));
    s.set = NodeSet(s.ids);
    if (s.set.size() != s.ids.size()) throw InputError(where + ": repeated node in scope");
    return s;
}

// Maps a joint state listed in file order to the NodeSet order.
inline std::vector<std::size_t> reorder(const NamedScope& s, const std::vector<std::size_t>& vals) {
    std::vector<std::size_t> out(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) out[s.set.position(s.ids[i])] = vals[i];
    return out;
}

inline Event event_from_json(const CredalNetwork& net, const Json& j, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected an object");
    if (j.contains("scope")) {
        auto s = named_scope(net, j["scope"], where + " scope");
        auto& st = field(j, "states", where);
        if (!st.is_array()) throw InputError(where + ": states must be a list");
        std::vector<std::vector<std::size_t>> members;
        for (auto& row : st) {
            auto names = string_list(row, where);
            if (names.size() != s.ids.size()) throw InputError(where + ": state has the wrong width");
            std::vector<std::size_t> vals;
            for (std::size_t i = 0; i < names.size(); ++i) vals.push_back(net.state_index(s.ids[i], names[i]));
            members.push_back(reorder(s, vals));
        }
        auto e = Event::of_states(net, s.set, members);
        e.cylinder = members.size() == 1;
        return e;
    }
    std::map<std::string, std::string> named;
    for (auto& [k, v] : j.items()) named[k] = json_string(v, where);
    if (named.empty()) return Event::everything();
    return Event::cylinder_of(net, net.assignment(named));
}

inline Factor factor_from_json(const CredalNetwork& net, const Json& j, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected an object");
    if (j.contains("indicator")) return event_from_json(net, j["indicator"], where + " indicator").indicator();
    if (j.contains("constant")) return Factor::constant(json_number(j["constant"], where));
    auto s = named_scope(net, field(j, "scope", where), where + " scope");
    auto table = number_list(field(j, "table", where), where + " table");
    std::vector<std::size_t> file_cards;
    for (auto v : s.ids) file_cards.push_back(net.card(v));
    if (table.size() != checked_product(file_cards)) throw InputError(where + ": table has the wrong size");
    Factor f = Factor::zeros(net, s.set);
    std::size_t i = 0;
    for (StateCounter it(file_cards); !it.done(); it.next()) f.table[f.index(reorder(s, it.values()))] = table[i++];
    return f;
}

inline Rule parse_rule(const std::string& s) {
    if (s == "natural") return Rule::natural;
    if (s == "regular") return Rule::regular;
    if (s == "unconditional") return Rule::unconditional;
    throw InputError("unknown rule '" + s + "'");
}

inline Method parse_method(const std::string& s) {
    if (s == "auto") return Method::automatic;
    if (s == "lp") return Method::lp;
    if (s == "decompose") return Method::decompose;
    if (s == "chain") return Method::chain;
    if (s == "hmm") return Method::hmm;
    throw InputError("unknown method '" + s + "'");
}

} // namespace detail

inline Query query_from_json(const CredalNetwork& net, const Json& j) {
    Query q;
    q.target = detail::factor_from_json(net, detail::field(j, "target", "query"), "target");
    if (j.contains("given")) q.given = detail::event_from_json(net, j["given"], "given");
    if (j.contains("rule")) q.rule = detail::parse_rule(detail::json_string(j["rule"], "rule"));
    else if (q.given && !q.given->is_sure()) q.rule = Rule::regular;
    if (j.contains("method")) q.method = detail::parse_method(detail::json_string(j["method"], "method"));
    if (j.contains("tolerance")) q.tolerance = detail::json_number(j["tolerance"], "tolerance");
    if (!(q.tolerance > 0.0)) throw InputError("tolerance must be positive");
    if (j.contains("hmm")) {
        auto& h = j["hmm"];
        HmmQuery hq;
        hq.states = detail::string_list(detail::field(h, "states", "hmm"), "hmm states");
        hq.observations = detail::string_list(detail::field(h, "observations", "hmm"), "hmm observations");
        if (h.contains("order")) hq.order = h["order"].get<int>();
        q.hmm = hq;
    }
    return q;
}

/// One query, or several when the document is a list.
inline std::vector<Query> parse_queries(const CredalNetwork& net, const std::string& text) {
    Json j = detail::parse_text(text, "query");
    std::vector<Query> out;
    if (j.is_array()) {
        for (auto& e : j) out.push_back(query_from_json(net, e));
    } else {
        out.push_back(query_from_json(net, j));
    }
    return out;
}

inline std::vector<Query> load_queries(const CredalNetwork& net, const std::string& path) {
    return parse_queries(net, read_file(path));
}

/// key=value lines for one inference result.
inline std::string format_result(const InferenceResult& r) {
    std::ostringstream os;
    os << "lower=" << display_number(r.lower) << "\n";
    os << "upper=" << display_number(r.upper) << "\n";
    os << "rule=" << to_string(r.rule) << "\n";
    os << "method=" << r.method << "\n";
    if (r.lower_bracket) {
        os << "lower_kind=" << to_string(r.lower_bracket->kind) << "\n";
        os << "lower_iterations=" << r.lower_bracket->iterations << "\n";
        os << "lower_bracket_width=" << display_number(r.lower_bracket->width) << "\n";
    }
    if (r.upper_bracket) {
        os << "upper_kind=" << to_string(r.upper_bracket->kind) << "\n";
        os << "upper_iterations=" << r.upper_bracket->iterations << "\n";
        os << "upper_bracket_width=" << display_number(r.upper_bracket->width) << "\n";
    }
    return os.str();
}

} // namespace credal
