#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "credal/errors.hpp"
#include "credal/network.hpp"
#include "credal/numeric.hpp"
#include "credal/polytope.hpp"
#include "credal/simplex.hpp"

namespace credal {

inline constexpr std::uint64_t max_lp_rows = std::uint64_t{1} << 20;
inline constexpr std::uint64_t max_lp_vars = std::uint64_t{1} << 16;
inline constexpr std::uint64_t max_lp_cells = std::uint64_t{1} << 27;
inline constexpr std::uint64_t max_vertex_enum_states = 64;

namespace detail {

// Number of γ rows of the global program, counted before anything is built.
inline std::uint64_t global_row_count(const CredalNetwork& net) {
    std::uint64_t rows = 0;
    for (NodeId s = 0; s < net.size(); ++s) {
        auto rel = relations(net.dag(), s);
        std::uint64_t nn = 1;
        for (auto v : rel.non_parent_non_descendants) {
            nn *= net.card(v);
            if (nn > max_lp_rows) return max_lp_rows + 1;
        }
        std::uint64_t gam = 0;
        for (std::size_t c = 0; c < net.config_count(s); ++c) gam += net.local(s, c).homogeneous().size();
        rows += nn * gam;
        if (rows > max_lp_rows) return rows;
    }
    return rows;
}

inline void check_lp_capability(const CredalNetwork& net, bool include_nonnegativity) {
    std::uint64_t vars = 1;
    for (NodeId v = 0; v < net.size(); ++v) {
        vars *= net.card(v);
        if (vars > max_lp_vars) throw CapabilityError("global program would exceed 2^16 variables");
    }
    std::uint64_t rows = global_row_count(net) + 1 + (include_nonnegativity ? vars : 0);
    if (rows > max_lp_rows) throw CapabilityError("global program would exceed 2^20 rows");
    if (rows * vars > max_lp_cells) throw CapabilityError("global program too large for dense rows");
}

} // namespace detail

/// The program whose feasible set is the irrelevant natural extension's
/// polytope over joint states x_G (lexicographic, declaration order).
inline LinearProgram build_global_lp(const CredalNetwork& net, const Factor& f, bool include_nonnegativity = false) {
    detail::check_lp_capability(net, include_nonnegativity);
    const Dag& dag = net.dag();
    NodeSet G = dag.all();
    auto cards = net.cards(G);
    const std::size_t n = checked_product(cards);
    LinearProgram lp;
    lp.num_vars = n;
    for (auto& z : joint_states(net, G)) lp.variable_names.push_back(net.describe(z));
    lp.objective = extend(net, f, G).table;

    for (NodeId s = 0; s < net.size(); ++s) {
        auto rel = relations(dag, s);
        const NodeSet& N = rel.non_descendants;
        auto ncards = net.cards(N);
        std::size_t groups = checked_product(ncards);
        // Group joint states by their restriction to N(s).
        std::vector<std::size_t> npos;
        for (auto v : N) npos.push_back(v);
        std::vector<std::vector<std::size_t>> members(groups);
        {
            std::size_t z = 0;
            for (StateCounter it(cards); !it.done(); it.next(), ++z) {
                std::size_t g = 0;
                for (std::size_t k = 0; k < npos.size(); ++k) g = g * ncards[k] + it.values()[npos[k]];
                members[g].push_back(z);
            }
        }
        std::size_t g = 0;
        for (StateCounter xn(ncards); !xn.done(); xn.next(), ++g) {
            auto lookup = [&](NodeId p) { return xn.values()[N.position(p)]; };
            std::size_t c = net.config_of(s, lookup);
            const auto& gammas = net.local(s, c).homogeneous();
            JointAssignment xa{N, xn.values()};
            std::string key = net.describe(xa);
            for (std::size_t j = 0; j < gammas.size(); ++j) {
                std::vector<double> row(n, 0.0);
                for (auto z : members[g]) {
                    // State of s inside joint state z.
                    std::size_t rem = z;
                    std::size_t zs = 0;
                    for (std::size_t k = cards.size(); k-- > 0;) {
                        if (k == s) {
                            zs = rem % cards[k];
                            break;
                        }
                        rem /= cards[k];
                    }
                    row[z] = gammas[j].gamma[zs];
                }
                lp.add_ge(std::move(row), 0.0,
                          "s=" + net.name(s) + " x_N=" + (key.empty() ? "-" : key) + " gamma=" + std::to_string(j));
            }
        }
    }
    if (include_nonnegativity)
        for (std::size_t z = 0; z < n; ++z) {
            std::vector<double> row(n, 0.0);
            row[z] = 1.0;
            lp.add_ge(std::move(row), 0.0, "nonneg " + lp.variable_names[z]);
        }
    lp.add_eq(std::vector<double>(n, 1.0), 1.0, "normalization");
    return lp;
}

/// Solves the global program; capability problems are reported in the status.
inline LpSolution solve_global_lp(const CredalNetwork& net, const Factor& f, bool include_nonnegativity = false) {
    try {
        return solve_dual(build_global_lp(net, f, include_nonnegativity));
    } catch (const CapabilityError&) {
        LpSolution s;
        s.status = LpStatus::capability_exceeded;
        return s;
    }
}

inline double lower_expectation_lp(const CredalNetwork& net, const Factor& f, bool include_nonnegativity = false) {
    auto sol = solve_dual(build_global_lp(net, f, include_nonnegativity));
    if (sol.status == LpStatus::infeasible) throw ModelError("global program is infeasible");
    if (sol.status != LpStatus::optimal) throw ModelError("global program is unbounded");
    return sol.optimum;
}

inline double upper_expectation_lp(const CredalNetwork& net, const Factor& f) { return -lower_expectation_lp(net, -f); }

/// Line-oriented text: header, variables, objective, rows in emission order.
inline void dump_lp(std::ostream& os, const LinearProgram& lp) {
    os << "lp variables=" << lp.num_vars << " ge=" << lp.ge.size() << " eq=" << lp.eq.size() << "\n";
    for (std::size_t j = 0; j < lp.num_vars; ++j)
        os << "var " << j << " " << (j < lp.variable_names.size() ? lp.variable_names[j] : "") << "\n";
    os << "minimize";
    for (double c : lp.objective) os << " " << format_number(c);
    os << "\n";
    auto row = [&](const char* kind, const LinearProgram::Row& r, const char* rel) {
        os << kind;
        for (double c : r.coef) os << " " << format_number(c);
        os << " " << rel << " " << format_number(r.bound);
        if (!r.label.empty()) os << " ; " << r.label;
        os << "\n";
    };
    for (auto& r : lp.ge) row("ge", r, ">=");
    for (auto& r : lp.eq) row("eq", r, "=");
}

/// Extreme points of the global polytope, as mass functions over joint states.
inline std::vector<MassFunction> enumerate_joint_extreme_points(const CredalNetwork& net, std::size_t max_rays = 20000) {
    if (net.joint_size(net.dag().all()) > max_vertex_enum_states)
        throw CapabilityError("vertex enumeration is limited to 64 joint states");
    auto lp = build_global_lp(net, Factor::constant(0.0), false);
    std::vector<Vec> rows;
    for (auto& r : lp.ge) rows.push_back(r.coef);
    auto pts = simplex_section_vertices(rows, lp.num_vars, max_rays);
    if (pts.empty()) throw ModelError("global polytope is empty");
    return pts;
}

} // namespace credal
