#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace credal;
using namespace credal::testing;

namespace {

constexpr double tol = 1e-6;

Factor product(const CredalNetwork& net, const Factor& a, const Factor& b) {
    return combine(net, a, b, [](double x, double y) { return x * y; });
}

Factor sum(const CredalNetwork& net, const Factor& a, const Factor& b) {
    return combine(net, a, b, [](double x, double y) { return x + y; });
}

std::vector<NodeSet> closed_sets(const CredalNetwork& net) {
    std::vector<NodeSet> out;
    for (auto& K : all_subsets(net.size()))
        if (!K.empty() && is_closed(net.dag(), K)) out.push_back(K);
    return out;
}

TEST(Marginalise, TenNodeBlockIsUnconditionalChainValue) {
    auto net = load_network(data_path("ten_nodes.json"));
    NodeSet K = net.node_set({"5", "7", "9"});
    auto x = net.assignment({{"3", "1"}, {"4", "0"}});
    auto x6 = net.assignment({{"6", "1"}});
    Factor h = Factor::on(net, net.node_set({"9"}), {2, -1});
    Trace trace;
    double v = marginalise(net, K, x, h, Event::everything(), Event::cylinder_of(net, x6), Engine::planner, &trace);
    auto sub = sub_network(net, K, x);
    EXPECT_NEAR(v, chain_forward(sub, translate(h, net, sub)), 1e-12);
    EXPECT_NEAR(v, lower_expectation_lp(sub, translate(h, net, sub)), 1e-9);
    ASSERT_FALSE(trace.empty());
    EXPECT_EQ(trace[0].kind, ReductionKind::marginalisation);
    // The same number through conditioning on the full evidence.
    auto q = load_queries(net, data_path("ten_nodes_query.json"));
    EXPECT_NEAR(infer(net, q[0]).lower, v, 1e-8);
    EXPECT_NEAR(infer(net, q[1]).lower, v, 1e-8);
}

TEST(Marginalise, HypothesisErrors) {
    auto net = load_network(data_path("ten_nodes.json"));
    NodeSet K = net.node_set({"5", "9"});
    auto x = net.assignment({{"3", "1"}, {"7", "0"}});
    Factor h = Factor::on(net, net.node_set({"9"}), {2, -1});
    EXPECT_THROW(marginalise(net, K, x, h, Event::everything(), Event::everything()), HypothesisError);
}

TEST(Marginalise, WholeGraphIsIdentity) {
    std::mt19937_64 rng(30);
    for (int i = 0; i < 20; ++i) {
        auto net = random_net(rng);
        auto f = random_factor(rng, net, net.dag().all());
        EXPECT_NEAR(marginalise(net, net.dag().all(), {}, f, Event::everything(), Event::everything(), Engine::lp),
                    lower_expectation_lp(net, f), 1e-9);
    }
}

TEST(Marginalise, RandomNetsMatchDirectConditioning) {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        auto net = random_net(rng, {2, 4});
        for (auto& K : closed_sets(net)) {
            auto rel = set_relations(net.dag(), K);
            auto xpa = random_assignment(rng, net, rel.parents);
            auto xk = random_assignment(rng, net, random_subset(rng, K, false));
            auto xnn = random_assignment(rng, net, random_subset(rng, rel.non_parent_non_descendants, false));
            auto f = random_factor(rng, net, K);
            Event BK = xk.scope.empty() ? Event::everything() : Event::cylinder_of(net, xk);
            Event BN = xnn.scope.empty() ? Event::everything() : Event::cylinder_of(net, xnn);
            double v = marginalise(net, K, xpa, f, BK, BN, Engine::lp);
            auto all = merge(merge(xk, xpa), xnn);
            Event B = all.scope.empty() ? Event::everything() : Event::cylinder_of(net, all);
            double direct = direct_condition(net, f, B, Rule::natural, Engine::lp).value;
            EXPECT_NEAR(v, direct, tol);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Iterated, VStructureInnerFactorIsLocal) {
    auto net = load_network(data_path("vstructure.json"));
    NodeId s3 = net.index("3");
    Factor f = Factor::on(net, NodeSet{s3}, {1, -2});
    double v = iterated_lower_expectation(net, NodeSet{s3}, f, Engine::lp);
    // Outer problem: the two unconnected roots with h(x1, x2) = local lower of f.
    Factor h = Factor::zeros(net, net.node_set({"1", "2"}));
    for (std::size_t c = 0; c < 4; ++c) h.table[c] = local_lower_expectation(net.local(s3, c), f.table);
    auto outer = sub_network(net, net.node_set({"1", "2"}), {});
    EXPECT_NEAR(v, lower_expectation_lp(outer, translate(h, net, outer)), 1e-9);
    EXPECT_NEAR(v, lower_expectation_lp(net, f), 1e-9);
}

TEST(Iterated, EmptySetAndPrecedenceFailure) {
    auto net = load_network(data_path("vstructure.json"));
    Factor f = Factor::on(net, net.dag().all(), {1, 2, 3, 4, 5, 6, 7, 8});
    EXPECT_NEAR(iterated_lower_expectation(net, NodeSet{}, f, Engine::lp), lower_expectation_lp(net, f), 1e-9);
    EXPECT_THROW(iterated_lower_expectation(net, net.node_set({"1"}), f), HypothesisError);
}

TEST(Iterated, RandomNetsMatchLp) {
    std::mt19937_64 rng(32);
    int checked = 0;
    for (int i = 0; i < 80; ++i) {
        auto net = random_net(rng, {2, 4, 0.8});
        const Dag& d = net.dag();
        for (auto& S : all_subsets(net.size())) {
            if (S.empty() || !detail::precedes_all(d, d.all() - S, S)) continue;
            auto f = random_factor(rng, net, d.all());
            EXPECT_NEAR(iterated_lower_expectation(net, S, f, Engine::lp), lower_expectation_lp(net, f), tol);
            ++checked;
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(Iterated, ChainLeafPeelingIsTransferRecursion) {
    std::mt19937_64 rng(33);
    auto net = random_chain(rng, 3);
    Factor h = random_factor(rng, net, NodeSet{2});
    double peeled = iterated_lower_expectation(net, NodeSet{2}, h, Engine::planner);
    EXPECT_EQ(peeled, chain_forward(net, h));
    EXPECT_NEAR(peeled, lower_expectation_lp(net, h), 1e-9);
}

TEST(Factorise, RandomNetsMatchLp) {
    std::mt19937_64 rng(34);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        auto net = random_net(rng, {2, 4});
        for (auto& K : closed_sets(net)) {
            auto rel = set_relations(net.dag(), K);
            auto xpa = random_assignment(rng, net, rel.parents);
            auto f = random_factor(rng, net, K);
            auto g = random_factor(rng, net, rel.non_parent_non_descendants, 0.0, 2.0);
            double v = factorise(net, K, xpa, f, g, Engine::lp);
            Factor ind = Event::cylinder_of(net, xpa).indicator();
            Factor total = product(net, product(net, g, ind), f);
            EXPECT_NEAR(v, lower_expectation_lp(net, total), tol);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Factorise, ZeroInnerValueAndErrors) {
    auto net = two_coins();
    Factor f = Factor::on(net, NodeSet{0}, {0, 0});
    Factor g = Factor::on(net, NodeSet{1}, {3, 5});
    EXPECT_EQ(factorise(net, NodeSet{0}, {}, f, g), 0.0);
    EXPECT_THROW(factorise(net, NodeSet{0}, {}, f, g.plus(-4)), HypothesisError);
}

TEST(Factorise, SignBranchesMeetAtZero) {
    auto net = load_network(data_path("ten_nodes.json"));
    NodeSet K = net.node_set({"9"});
    auto x = net.assignment({{"7", "1"}});
    Factor g = Factor::on(net, net.node_set({"1", "6"}), {0.5, 1, 2, 0.25});
    Factor base = Factor::on(net, K, {1, -1});
    double e = local_lower_expectation(net.local_given(net.index("9"), x), base.table);
    // Shift f so the inner lower expectation passes through zero.
    for (double eps : {-1e-3, 0.0, 1e-3}) {
        double v = factorise(net, K, x, base.plus(-e + eps), g);
        EXPECT_LE(std::fabs(v), 3e-3);
    }
}

TEST(Additivity, TwoUnconnectedNodes) {
    auto net = two_coins();
    Factor f = Factor::on(net, NodeSet{0}, {1, -3});
    Factor h = Factor::on(net, NodeSet{1}, {2, 0.5});
    double v = external_additivity(net, NodeSet{0}, f, h, Engine::lp);
    double want = local_lower_expectation(net.local(0, 0), f.table) + local_lower_expectation(net.local(1, 0), h.table);
    EXPECT_NEAR(v, want, 1e-9);
    EXPECT_NEAR(v, lower_expectation_lp(net, sum(net, f, h)), 1e-9);
    EXPECT_NEAR(external_additivity(net, NodeSet{0}, Factor::on(net, NodeSet{0}, {0, 0}), h),
                local_lower_expectation(net.local(1, 0), h.table), 1e-9);
}

TEST(Additivity, RandomNetsMatchLp) {
    std::mt19937_64 rng(35);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        auto net = random_net(rng, {2, 4, 0.4});
        for (auto& K : closed_sets(net)) {
            auto rel = set_relations(net.dag(), K);
            if (!rel.parents.empty()) {
                EXPECT_THROW(external_additivity(net, K, Factor::zeros(net, K), Factor::constant(0)), HypothesisError);
                continue;
            }
            auto f = random_factor(rng, net, K);
            auto h = random_factor(rng, net, rel.non_parent_non_descendants);
            EXPECT_NEAR(external_additivity(net, K, f, h, Engine::lp), lower_expectation_lp(net, sum(net, f, h)), tol);
            ++checked;
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(Combined, RandomNetsMatchLpAndSpecialise) {
    std::mt19937_64 rng(36);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        auto net = random_net(rng, {2, 4});
        for (auto& K : closed_sets(net)) {
            auto rel = set_relations(net.dag(), K);
            auto xpa = random_assignment(rng, net, rel.parents);
            auto f = random_factor(rng, net, K);
            auto h = random_factor(rng, net, rel.non_descendants);
            auto g = random_factor(rng, net, rel.non_parent_non_descendants, 0.0, 2.0);
            double v = combined(net, K, xpa, f, h, g, Engine::lp);
            Factor ind = Event::cylinder_of(net, xpa).indicator();
            Factor total = sum(net, h, product(net, product(net, g, ind), f));
            EXPECT_NEAR(v, lower_expectation_lp(net, total), tol);
            // h = 0 gives factorisation.
            EXPECT_NEAR(combined(net, K, xpa, f, Factor::constant(0), g, Engine::lp),
                        factorise(net, K, xpa, f, g, Engine::lp), tol);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(AtomBounds, TwoCoins) {
    auto net = two_coins();
    auto b = atom_bounds(net, {NodeSet{0, 1}, {0, 0}});
    EXPECT_NEAR(b.lower, 1.0 / 16, 1e-12);
    EXPECT_NEAR(b.upper, 9.0 / 16, 1e-12);
    Factor ind = Factor::on(net, NodeSet{0, 1}, {1, 0, 0, 0});
    EXPECT_NEAR(lower_expectation_lp(net, ind), 1.0 / 16, 1e-9);
    EXPECT_NEAR(upper_expectation_lp(net, ind), 9.0 / 16, 1e-9);
}

TEST(AtomBounds, RandomNetsMatchLp) {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 60; ++i) {
        auto net = random_net(rng, {1, 4, 0.5, 0.15, 0.2});
        NodeSet G = net.dag().all();
        auto x = random_assignment(rng, net, G);
        auto b = atom_bounds(net, x);
        Factor ind = Event::cylinder_of(net, x).indicator();
        EXPECT_NEAR(b.lower, lower_expectation_lp(net, ind), tol);
        EXPECT_NEAR(b.upper, upper_expectation_lp(net, ind), tol);
        EXPECT_LE(0.0, b.lower);
        EXPECT_LE(b.lower, b.upper);
        EXPECT_LE(b.upper, 1.0);
    }
}

TEST(Planner, RandomNetsAndScopesMatchLp) {
    std::mt19937_64 rng(38);
    for (int i = 0; i < 150; ++i) {
        auto net = random_net(rng, {1, 4, 0.5, 0.1, 0.1});
        auto scope = random_subset(rng, net.dag().all(), false);
        auto f = random_factor(rng, net, scope);
        Trace trace;
        double planned = lower_expectation(net, f, Engine::planner, &trace);
        EXPECT_NEAR(planned, lower_expectation_lp(net, f), tol);
        // Constant factors short-circuit without a reduction.
        EXPECT_EQ(trace.empty(), f.min() == f.max());
    }
}

TEST(Planner, FixtureNetsMatchLp) {
    std::mt19937_64 rng(39);
    for (auto file : {"chain3.json", "hmm.json", "vstructure.json", "two_coins.json"}) {
        auto net = load_network(data_path(file));
        for (int i = 0; i < 5; ++i) {
            auto f = random_factor(rng, net, random_subset(rng, net.dag().all()));
            EXPECT_NEAR(lower_expectation(net, f, Engine::planner), lower_expectation_lp(net, f), tol) << file;
        }
    }
}

} // namespace
