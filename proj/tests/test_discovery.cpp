#include <gtest/gtest.h>

#include "entlayer/discovery.hpp"
#include "entlayer/generator.hpp"
#include "entlayer/scm_io.hpp"
#include "entlayer/verify.hpp"
#include "support/test_support.hpp"

namespace entlayer {
namespace {

using testing::data_path;
using testing::ids;
using testing::layering;

KnownNoiseEntropy known_mode(const Scm& m) {
    KnownNoiseEntropy k;
    for (NodeId v : m.graph().nodes()) k.entropies[v] = noise_entropy(m, v);
    return k;
}

Scm independent_pair() {
    const Dag g = Dag::from_labels({"A", "B"}, {});
    const StructuralTable id({}, {{{}, 0, 0}, {{}, 1, 1}});
    return Scm(g, {{0, 1}, {0, 1}}, {Pmf::bernoulli(Rational(1, 3)), Pmf::bernoulli(Rational(1, 5))},
               {id, id});
}

Scm lone_node() {
    return Scm(Dag::from_labels({"A"}, {}), {{0, 1}}, {Pmf::bernoulli(Rational(1, 3))},
               {StructuralTable({}, {{{}, 0, 0}, {{}, 1, 1}})});
}

TEST(SourDiscover, AffineChainMonotone) {
    const Scm m = load_scm(data_path("affine-chain-3.json"));
    const TableOracle o(joint_distribution(m, false));
    const auto r = sour_discover(m.graph().nodes(), o, MonotoneEntropy{});
    EXPECT_EQ(r.layering, layering(m.graph(), {{"A"}, {"B"}, {"C"}}));
    EXPECT_EQ(r.oracle_calls, 6u);
    ASSERT_EQ(r.trace.size(), 3u);
    const auto& first = r.trace[0].entropies;
    EXPECT_NEAR(first.at(node_id(0)), 0.5435644431995964, 1e-9);
    EXPECT_NEAR(first.at(node_id(1)), 1.3548425676587292, 1e-9);
    EXPECT_NEAR(first.at(node_id(2)), 2.3548425676587295, 1e-9);
    EXPECT_NEAR(first.at(node_id(1)), first.at(node_id(0)) + noise_entropy(m, node_id(1)), 1e-9);
    EXPECT_EQ(r.trace[0].selected, ids(m.graph(), {"A"}));
    EXPECT_FALSE(r.known_entropies);
    EXPECT_TRUE(r.guaranteed);
}

TEST(SourDiscover, SingleNode) {
    const Scm m = lone_node();
    const TableOracle o(joint_distribution(m, false));
    for (const DiscoveryMode& mode : {DiscoveryMode{MonotoneEntropy{}}, DiscoveryMode{known_mode(m)}}) {
        const auto r = sour_discover(m.graph().nodes(), o, mode);
        EXPECT_EQ(r.layering, layering(m.graph(), {{"A"}}));
        EXPECT_EQ(r.oracle_calls, 1u);
        const auto s = sir_discover(m.graph().nodes(), o, mode);
        EXPECT_EQ(s.layering, layering(m.graph(), {{"A"}}));
    }
}

TEST(SourDiscover, EdgelessKnownTakesBothAtOnce) {
    const Scm m = independent_pair();
    const TableOracle o(joint_distribution(m, false));
    const auto r = sour_discover(m.graph().nodes(), o, known_mode(m));
    EXPECT_EQ(r.layering, layering(m.graph(), {{"A", "B"}}));
    EXPECT_EQ(r.oracle_calls, 2u);
}

TEST(SirDiscover, EdgelessKnown) {
    const Scm m = independent_pair();
    const TableOracle o(joint_distribution(m, false));
    const auto r = sir_discover(m.graph().nodes(), o, known_mode(m));
    EXPECT_EQ(r.layering, layering(m.graph(), {{"A", "B"}}));
    EXPECT_NEAR(r.trace[0].entropies.at(node_id(0)), noise_entropy(m, node_id(0)), 1e-12);
    EXPECT_NEAR(r.trace[0].entropies.at(node_id(1)), noise_entropy(m, node_id(1)), 1e-12);
}

TEST(SirDiscover, XorChainMonotone) {
    const Scm m = load_scm(data_path("xor-chain-3.json"));
    const TableOracle o(joint_distribution(m, false));
    const auto r = sir_discover(m.graph().nodes(), o, MonotoneEntropy{});
    EXPECT_EQ(r.layering, layering(m.graph(), {{"A"}, {"B"}, {"C"}}));
    const auto& first = r.trace[0].entropies;
    EXPECT_NEAR(first.at(node_id(2)), 1.0, 1e-9);
    EXPECT_LT(first.at(node_id(0)), noise_entropy(m, node_id(0)));
    EXPECT_LE(first.at(node_id(1)), 0.82);
    EXPECT_EQ(r.trace[0].selected, ids(m.graph(), {"C"}));
    EXPECT_EQ(r.oracle_calls, 6u);
}

TEST(SourDiscover, KnownModeViolationCarriesTrace) {
    // Disclosed entropies that match no conditional entropy leave nothing to remove.
    const Scm m = load_scm(data_path("xor-chain-3.json"));
    const TableOracle o(joint_distribution(m, false));
    KnownNoiseEntropy wrong;
    for (NodeId v : m.graph().nodes()) wrong.entropies[v] = 5.0;
    try {
        sour_discover(m.graph().nodes(), o, wrong);
        FAIL() << "expected AssumptionViolation";
    } catch (const AssumptionViolation& e) {
        ASSERT_EQ(e.partial().trace.size(), 1u);
        EXPECT_TRUE(e.partial().trace[0].qualifying.empty());
        EXPECT_EQ(e.partial().oracle_calls, 3u);
    }
}

TEST(SourDiscover, KnownModeRequiresEveryEntropy) {
    const Scm m = independent_pair();
    const TableOracle o(joint_distribution(m, false));
    KnownNoiseEntropy partial;
    partial.entropies[node_id(0)] = 1.0;
    EXPECT_THROW(sour_discover(m.graph().nodes(), o, partial), OracleError);
}

TEST(SourDiscover, OneAtATimeBreaksTiesBySmallestId) {
    const Scm m = independent_pair();
    const TableOracle o(joint_distribution(m, false));
    DiscoveryOptions opt;
    opt.one_at_a_time = true;
    const auto r = sour_discover(m.graph().nodes(), o, known_mode(m), opt);
    EXPECT_EQ(r.layering, layering(m.graph(), {{"A"}, {"B"}}));
    EXPECT_EQ(r.oracle_calls, 3u);
}

TEST(Discover, FormatsTrace) {
    const Scm m = load_scm(data_path("affine-chain-3.json"));
    const TableOracle o(joint_distribution(m, false));
    DiscoveryOptions opt;
    opt.guaranteed = false;
    const auto r = discover(Algorithm::sour, m.graph().nodes(), o, MonotoneEntropy{}, opt);
    const std::string text = format_discovery(r, m.graph().registry());
    EXPECT_NE(text.find("no correctness guarantee"), std::string::npos);
    EXPECT_NE(text.find("layer 1: A\n"), std::string::npos);
    EXPECT_NE(text.find("oracle_calls: 6\n"), std::string::npos);
    EXPECT_NE(text.find("iter 1: candidates {A: 0.543564443"), std::string::npos) << text;
    EXPECT_EQ(parse_algorithm("sir"), Algorithm::sir);
    EXPECT_THROW(parse_algorithm("rr"), std::invalid_argument);
}

struct Combo {
    const char* name;
    Algorithm algo;
    bool known;
    Profile profile;
    EntropyOrder entropy;
};

class LicensedDiscovery : public ::testing::TestWithParam<Combo> {};

TEST_P(LicensedDiscovery, RecoversValidLayeringWithinCallBound) {
    const Combo c = GetParam();
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        GeneratorConfig cfg;
        cfg.nodes = 1 + seed % 6;
        cfg.profile = c.profile;
        cfg.entropy = c.entropy;
        const Scm m = generate_scm(cfg, seed);
        const TableOracle o(joint_distribution(m, false));
        const DiscoveryMode mode = c.known ? DiscoveryMode{known_mode(m)} : MonotoneEntropy{};
        for (bool one : {false, true}) {
            DiscoveryOptions opt;
            opt.one_at_a_time = one;
            const auto r = discover(c.algo, m.graph().nodes(), o, mode, opt);
            const auto truth = check_discovery_against_truth(m.graph(), r);
            EXPECT_TRUE(truth.ok) << c.name << " seed " << seed << ": " << truth.reason;
            if (c.known && !one) {
                const auto eq = check_equality_sets(m.graph(), r);
                EXPECT_TRUE(eq.ok) << c.name << " seed " << seed << ": " << eq.reason;
            }
            EXPECT_TRUE(check_call_bound(r, m.size()));
            EXPECT_LE(r.trace.size(), m.size());
            for (std::size_t k = 1; k < r.trace.size(); ++k) {
                EXPECT_LT(r.trace[k].remaining.size(), r.trace[k - 1].remaining.size());
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(
    Combos, LicensedDiscovery,
    ::testing::Values(
        Combo{"sour_known", Algorithm::sour, true, Profile::plus_one, EntropyOrder::known},
        Combo{"sour_monotone", Algorithm::sour, false, Profile::plus_one, EntropyOrder::weak},
        Combo{"sir_known", Algorithm::sir, true, Profile::sir_faithful, EntropyOrder::known},
        Combo{"sir_monotone_weak", Algorithm::sir, false, Profile::sir_faithful, EntropyOrder::weak},
        Combo{"sir_monotone_strict", Algorithm::sir, false, Profile::base, EntropyOrder::strict}),
    [](const auto& info) { return std::string(info.param.name); });

TEST(CallBound, EdgelessMaximalRemovalUsesNCalls) {
    for (std::size_t n = 1; n <= 6; ++n) {
        GeneratorConfig cfg;
        cfg.nodes = n;
        cfg.edge_probability = 0.0;
        cfg.profile = Profile::plus_one;
        const Scm m = generate_scm(cfg, n);
        const TableOracle o(joint_distribution(m, false));
        EXPECT_EQ(sour_discover(m.graph().nodes(), o, known_mode(m)).oracle_calls, n);
        EXPECT_EQ(sir_discover(m.graph().nodes(), o, known_mode(m)).oracle_calls, n);
    }
}

}  // namespace
}  // namespace entlayer
