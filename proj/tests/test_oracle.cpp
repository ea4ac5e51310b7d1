#include <cmath>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>

#include "entlayer/faithfulness.hpp"
#include "entlayer/generator.hpp"
#include "entlayer/oracle.hpp"
#include "entlayer/scm_io.hpp"
#include "support/test_support.hpp"

namespace entlayer {
namespace {

using testing::data_path;

const NodeId A = node_id(0);
const NodeId B = node_id(1);
const NodeId C = node_id(2);

std::vector<NodeSet> all_subsets(const NodeSet& universe) {
    const std::vector<NodeId> items(universe.begin(), universe.end());
    std::vector<NodeSet> out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << items.size()); ++bits) {
        NodeSet s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (bits & (std::size_t{1} << i)) s.insert(items[i]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

NodeSet unite(NodeSet a, const NodeSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}

TEST(JointDistribution, SingleFairCoin) {
    const Dag g = Dag::from_labels({"A"}, {});
    const Scm m(g, {{0, 1}}, {Pmf::bernoulli(Rational(1, 2))},
                {StructuralTable({}, {{{}, 0, 0}, {{}, 1, 1}})});
    const JointTable t = joint_distribution(m, false);
    ASSERT_EQ(t.entries().size(), 2u);
    EXPECT_EQ(t.entries().at({0}), Rational(1, 2));
    EXPECT_EQ(t.entries().at({1}), Rational(1, 2));
    EXPECT_TRUE(t.exact());
}

TEST(JointDistribution, XorChainCell) {
    const Scm m = load_scm(data_path("xor-chain-3.json"));
    const JointTable t = joint_distribution(m, false);
    EXPECT_EQ(t.entries().at({0, 0, 0}), Rational(21, 64));
    EXPECT_EQ(t.total(), Rational(1));
    const JointTable full = joint_distribution(m, true);
    EXPECT_EQ(full.variables().size(), 6u);
    EXPECT_EQ(full.labels()[3], "N_A");
    EXPECT_EQ(full.total(), Rational(1));
}

TEST(JointDistribution, TotalMassIsExactlyOne) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GeneratorConfig cfg;
        cfg.nodes = 1 + seed % 5;
        cfg.profile = seed % 2 ? Profile::plus_one : Profile::base;
        const Scm m = generate_scm(cfg, seed);
        EXPECT_EQ(joint_distribution(m, true).total(), Rational(1));
    }
}

TEST(JointDistribution, BudgetErrorNamesTupleCount) {
    const Scm m = load_scm(data_path("xor-chain-3.json"));
    try {
        joint_distribution(m, false, 7);
        FAIL() << "expected a budget error";
    } catch (const OracleError& e) {
        EXPECT_NE(std::string(e.what()).find("8 tuples"), std::string::npos) << e.what();
    }
}

TEST(JointTable, RejectsBadMass) {
    EXPECT_THROW(JointTable({A}, {"A"}, {{{0}, Rational(1, 2)}}), OracleError);
    EXPECT_THROW(JointTable({A}, {"A"}, {{{0}, Rational(3, 2)}, {{1}, Rational(-1, 2)}}),
                 OracleError);
    EXPECT_THROW(JointTable({A, A}, {"A", "A"}, {{{0, 0}, Rational(1)}}), OracleError);
    const JointTable t({A}, {"A"}, {{{0}, Rational(1)}, {{1}, Rational(0)}});
    EXPECT_EQ(t.entries().size(), 1u);
}

TEST(CondEntropy, Examples) {
    const Scm m = load_scm(data_path("xor-chain-3.json"));
    const TableOracle o(joint_distribution(m, true));
    EXPECT_NEAR(o.cond_entropy({B}, {A}), noise_entropy(m, B), 1e-12);
    EXPECT_NEAR(o.cond_entropy({B}, {A}), 0.811278124459133, 1e-12);
    EXPECT_NEAR(o.cond_entropy({A}, {}), 0.543564443199596, 1e-12);
    EXPECT_THROW(o.cond_entropy({A}, {A, B}), OracleError);
    EXPECT_THROW(o.cond_entropy({}, {A}), OracleError);
    EXPECT_THROW(o.cond_entropy({node_id(17)}, {}), OracleError);
    EXPECT_EQ(o.cond_entropy({B}, {A, m.noise_node(B)}), 0.0);
}

TEST(IsIndependent, Examples) {
    const Dag g = Dag::from_labels({"A", "B"}, {});
    const StructuralTable id({}, {{{}, 0, 0}, {{}, 1, 1}});
    const Scm two(g, {{0, 1}, {0, 1}},
                  {Pmf::bernoulli(Rational(1, 3)), Pmf::bernoulli(Rational(1, 5))}, {id, id});
    const TableOracle o2(joint_distribution(two, false));
    EXPECT_TRUE(is_independent(o2, {A}, {B}, {}));

    // In xor-chain-3 the fair coin N_C makes C independent of A.
    const TableOracle ox(joint_distribution(load_scm(data_path("xor-chain-3.json")), false));
    EXPECT_TRUE(is_independent(ox, {A}, {C}, {}));
    EXPECT_TRUE(is_independent(ox, {A}, {C}, {B}));
    EXPECT_FALSE(is_independent(ox, {A}, {B}, {}));

    const TableOracle oa(joint_distribution(load_scm(data_path("affine-chain-3.json")), false));
    EXPECT_FALSE(is_independent(oa, {A}, {C}, {}));
    EXPECT_TRUE(is_independent(oa, {A}, {C}, {B}));
    EXPECT_THROW(is_independent(oa, {A}, {A}, {}), OracleError);
    EXPECT_THROW(is_independent(oa, {A}, {C}, {A}), OracleError);
}

TEST(EmpiricalJoint, Basics) {
    Dataset one{{"A", "B"}, {{1, 0}}};
    const JointTable t = empirical_joint(one);
    ASSERT_EQ(t.entries().size(), 1u);
    EXPECT_EQ(t.entries().at({1, 0}), Rational(1));
    EXPECT_THROW(empirical_joint(Dataset{{"A"}, {}}), OracleError);

    const Scm m = load_scm(data_path("xor-chain-3.json"));
    const JointTable exact = joint_distribution(m, false);
    const JointTable est = empirical_joint(sample(m, 17, 100000));
    EXPECT_EQ(est.total(), Rational(1));
    for (const auto& [a, p] : exact.entries()) {
        const auto it = est.entries().find(a);
        const double q = it == est.entries().end() ? 0.0 : it->second.get_d();
        EXPECT_NEAR(q, p.get_d(), 0.01);
    }
}

TEST(OracleProperties, ChainRuleAndConditioning) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        GeneratorConfig cfg;
        cfg.nodes = 3;
        cfg.profile = seed % 2 ? Profile::plus_one : Profile::base;
        const Scm m = generate_scm(cfg, seed);
        // 3 observed + 3 noise = 6 variables
        const TableOracle o(joint_distribution(m, true));
        NodeSet all;
        for (std::size_t i = 0; i < 6; ++i) all.insert(node_id(i));
        for (const NodeSet& x : all_subsets(all)) {
            if (x.empty()) continue;
            NodeSet rest;
            for (NodeId v : all) {
                if (!x.count(v)) rest.insert(v);
            }
            for (const NodeSet& y : all_subsets(rest)) {
                if (y.empty()) continue;
                NodeSet rest2;
                for (NodeId v : rest) {
                    if (!y.count(v)) rest2.insert(v);
                }
                for (const NodeSet& s : all_subsets(rest2)) {
                    const double lhs = o.cond_entropy(unite(x, y), s);
                    const double rhs = o.cond_entropy(x, s) + o.cond_entropy(y, unite(x, s));
                    ASSERT_NEAR(lhs, rhs, 1e-9);
                    ASSERT_LE(o.cond_entropy(x, unite(s, y)), o.cond_entropy(x, s) + 1e-12);
                }
            }
        }
    }
}

TEST(CountingOracle, MatchesInnerAndCounts) {
    const Scm m = load_scm(data_path("affine-chain-3.json"));
    const TableOracle inner(joint_distribution(m, false));
    const CountingOracle counting(inner);
    EXPECT_EQ(counting.cond_entropy({C}, {A}), inner.cond_entropy({C}, {A}));
    EXPECT_EQ(counting.cond_entropy({B}, {}), inner.cond_entropy({B}, {}));
    EXPECT_EQ(counting.calls(), 2u);
    EXPECT_THROW(counting.cond_entropy({A}, {A}), OracleError);
    EXPECT_EQ(counting.calls(), 3u);
}

TEST(CountingOracle, ConcurrentQueries) {
    GeneratorConfig cfg;
    cfg.nodes = 5;
    const Scm m = generate_scm(cfg, 3);
    const TableOracle inner(joint_distribution(m, false));
    const TableOracle reference(joint_distribution(m, false));
    const CountingOracle counting(inner);
    const auto subsets = all_subsets(m.graph().nodes());
    constexpr int kThreads = 8;
    std::vector<std::thread> threads;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < kThreads; ++t) {
        threads.emplace_back([&, t] {
            for (std::size_t i = 0; i < subsets.size(); ++i) {
                const NodeId v = node_id((i + static_cast<std::size_t>(t)) % 5);
                NodeSet s = subsets[i];
                s.erase(v);
                if (counting.cond_entropy({v}, s) != reference.cond_entropy({v}, s)) ++mismatches;
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(mismatches.load(), 0);
    EXPECT_EQ(counting.calls(), kThreads * subsets.size());
}

TEST(Faithfulness, IndependenceMatchesDSeparationOnGeneratedModels) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        GeneratorConfig cfg;
        cfg.nodes = 2 + seed % 4;
        const Scm m = generate_scm(cfg, seed);
        ASSERT_EQ(m.metadata().faithfulness, FaithfulnessScope::exhaustive);
        const TableOracle o(joint_distribution(m, false));
        testing::for_each_triple(m.graph(), [&](const NodeSet& x, const NodeSet& y, const NodeSet& s) {
            ASSERT_EQ(is_independent(o, x, y, s), d_separated(m.graph(), x, y, s));
        });
    }
}

TEST(Faithfulness, DSeparationImpliesIndependenceEvenWhenUnfaithful) {
    const Scm m = load_scm(data_path("xor-chain-3.json"));
    const TableOracle o(joint_distribution(m, false));
    testing::for_each_triple(m.graph(), [&](const NodeSet& x, const NodeSet& y, const NodeSet& s) {
        if (d_separated(m.graph(), x, y, s)) EXPECT_TRUE(is_independent(o, x, y, s));
    });
    const auto report = check_faithfulness(m, FaithfulnessScope::exhaustive);
    EXPECT_FALSE(report.holds);
    ASSERT_FALSE(report.witnesses.empty());
    EXPECT_NE(report.witnesses[0].find("independent but d-connected"), std::string::npos);
    // C determines (A, B) in the affine chain, so A and B look independent given C.
    const Scm affine = load_scm(data_path("affine-chain-3.json"));
    EXPECT_FALSE(check_faithfulness(affine, FaithfulnessScope::singleton).holds);
    const TableOracle oa(joint_distribution(affine, false));
    EXPECT_TRUE(is_independent(oa, {A}, {B}, {C}));
}

TEST(DirectedFaithfulness, ChainExamples) {
    const auto x = check_directed_faithfulness(load_scm(data_path("xor-chain-3.json")));
    EXPECT_FALSE(x.holds);
    ASSERT_FALSE(x.witnesses.empty());
    EXPECT_NE(x.witnesses[0].find("N_A independent of descendant C"), std::string::npos);
    EXPECT_TRUE(check_directed_faithfulness(load_scm(data_path("affine-chain-3.json"))).holds);
}

}  // namespace
}  // namespace entlayer
