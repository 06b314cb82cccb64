#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credal/credal.hpp"

using namespace credal;

namespace {

NodeSet parse_node_list(const CredalNetwork& net, const std::string& text) {
    std::vector<std::string> names;
    if (text != "-") {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) names.push_back(item);
    }
    return net.node_set(names);
}

int cmd_validate(const std::string& path) {
    auto d = parse_network_description(read_file(path));
    auto report = validate(d);
    if (report.empty()) {
        std::cout << "valid=true\n";
        return 0;
    }
    std::cout << "valid=false\n";
    for (auto& r : report) std::cout << "problem=" << r << "\n";
    return 2;
}

void dump_programs(const CredalNetwork& net, const std::vector<Query>& qs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    for (auto& q : qs) dump_lp(out, build_global_lp(net, q.target));
}

int cmd_infer(const std::string& net_path, const std::string& query_path, const std::string& lp_dump, bool trace) {
    auto net = load_network(net_path);
    auto qs = load_queries(net, query_path);
    if (!lp_dump.empty()) dump_programs(net, qs, lp_dump);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        auto r = infer(net, qs[i]);
        if (qs.size() > 1) std::cout << "query=" << i << "\n";
        std::cout << format_result(r);
        if (trace) write_trace(std::cout, r.trace);
    }
    return 0;
}

int cmd_adsep(const std::string& path, const std::string& I, const std::string& S, const std::string& C) {
    auto net = load_network(path);
    auto i = parse_node_list(net, I), s = parse_node_list(net, S), c = parse_node_list(net, C);
    const Dag& dag = net.dag();
    auto b = [](bool v) { return v ? "true" : "false"; };
    std::cout << "AD(I,S|C)=" << b(ad_separated(dag, i, s, c)) << "\n";
    std::cout << "AD(S,I|C)=" << b(ad_separated(dag, s, i, c)) << "\n";
    std::cout << "d(I,S|C)=" << b(d_separated(dag, i, s, c)) << "\n";
    std::cout << "d(S,I|C)=" << b(d_separated(dag, s, i, c)) << "\n";
    return 0;
}

int cmd_vertices(const std::string& path) {
    auto net = load_network(path);
    auto pts = enumerate_joint_extreme_points(net);
    std::cout << "count=" << pts.size() << "\n";
    for (auto& p : pts) {
        std::cout << "vertex=";
        for (std::size_t k = 0; k < p.size(); ++k) std::cout << (k ? " " : "") << display_number(p[k]);
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lower and upper expectations in credal networks"};
    app.require_subcommand(1);

    std::string net, query, lp_dump, I, S, C;

    auto* validate_cmd = app.add_subcommand("validate", "Check a network file");
    validate_cmd->add_option("network", net, "Network file")->required();

    auto* infer_cmd = app.add_subcommand("infer", "Lower and upper values of one or more queries");
    infer_cmd->add_option("network", net, "Network file")->required();
    infer_cmd->add_option("query", query, "Query file (object or list of objects)")->required();
    infer_cmd->add_option("--lp-dump", lp_dump, "Write the global linear program of each target to this path");

    auto* trace_cmd = app.add_subcommand("trace", "Like infer, followed by the reduction log");
    trace_cmd->add_option("network", net, "Network file")->required();
    trace_cmd->add_option("query", query, "Query file")->required();
    trace_cmd->add_option("--lp-dump", lp_dump, "Write the global linear program of each target to this path");

    auto* adsep_cmd = app.add_subcommand("adsep", "AD- and d-separation in both argument orders");
    adsep_cmd->add_option("network", net, "Network file")->required();
    adsep_cmd->add_option("I", I, "Comma-separated nodes, '-' for none")->required();
    adsep_cmd->add_option("S", S, "Comma-separated nodes")->required();
    adsep_cmd->add_option("C", C, "Comma-separated nodes, '-' for none")->required();

    auto* vertices_cmd = app.add_subcommand("vertices", "Extreme points of the global polytope");
    vertices_cmd->add_option("network", net, "Network file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) return cmd_validate(net);
        if (*infer_cmd) return cmd_infer(net, query, lp_dump, false);
        if (*trace_cmd) return cmd_infer(net, query, lp_dump, true);
        if (*adsep_cmd) return cmd_adsep(net, I, S, C);
        if (*vertices_cmd) return cmd_vertices(net);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
