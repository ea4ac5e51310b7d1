#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "entlayer/cli.hpp"
#include "entlayer/scm_io.hpp"
#include "support/test_support.hpp"

namespace entlayer {
namespace {

using testing::data_path;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "entlayer");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("entlayer_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::filesystem::path dir_;
};

const std::string xor_chain = data_path("xor-chain-3.json").string();
const std::string affine_chain = data_path("affine-chain-3.json").string();

TEST_F(CliTest, GenWritesScmAndSidecar) {
    const auto r = run({"gen", "--nodes", "5", "--profile", "plus_one", "--entropy", "strict",
                        "--seed", "7", "-o", path("m.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Scm m = load_scm(path("m.json"));
    EXPECT_EQ(m.size(), 5u);
    const std::string sidecar = read_file(path("m.json.assumptions"));
    EXPECT_EQ(sidecar.find("fails"), std::string::npos) << sidecar;
    EXPECT_NE(sidecar.find("injective_noise_plus_one holds"), std::string::npos);

    ASSERT_EQ(run({"gen", "--nodes", "5", "--profile", "plus_one", "--entropy", "strict",
                   "--seed", "7", "-o", path("again.json")})
                  .code,
              kExitOk);
    EXPECT_EQ(read_file(path("m.json")), read_file(path("again.json")));
}

TEST_F(CliTest, GenSingleNodeToStdout) {
    const auto r = run({"gen", "--nodes", "1"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(parse_scm(r.out).size(), 1u);
}

TEST_F(CliTest, GenRejectsUnknownProfile) {
    EXPECT_EQ(run({"gen", "--profile", "nope"}).code, kExitUsage);
}

TEST_F(CliTest, GenUnsatisfiableExitsNonzero) {
    const auto r = run({"gen", "--nodes", "3", "--support-min", "3", "--support-max", "2"});
    EXPECT_NE(r.code, kExitOk);
    EXPECT_NE(r.err.find("support bounds"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, DiscoverAffineSourMonotone) {
    const auto r = run({"discover", affine_chain, "--algo", "sour", "--mode", "monotone"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("layer 1: A\nlayer 2: B\nlayer 3: C\noracle_calls: 6\n"),
              std::string::npos)
        << r.out;
    EXPECT_EQ(r.out.find("no correctness guarantee"), std::string::npos);
}

TEST_F(CliTest, DiscoverMachineOutput) {
    const auto r =
        run({"discover", affine_chain, "--algo", "sir", "--mode", "known", "--machine"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("layer.1=A\nlayer.2=B\nlayer.3=C\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("oracle_calls=6\n"), std::string::npos);
    EXPECT_NE(r.out.find("guaranteed=true\n"), std::string::npos);
}

TEST_F(CliTest, DiscoverXorSirMonotoneIsLicensed) {
    const auto r = run({"discover", xor_chain, "--algo", "sir", "--mode", "monotone"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("layer 1: A\nlayer 2: B\nlayer 3: C\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, DiscoverRefusesSourOnXor) {
    for (const char* mode : {"known", "monotone"}) {
        const auto r = run({"discover", xor_chain, "--algo", "sour", "--mode", mode});
        EXPECT_EQ(r.code, kExitAssumption);
        EXPECT_NE(r.err.find("injective_noise_plus_one"), std::string::npos) << r.err;
        EXPECT_NE(r.err.find("both -> "), std::string::npos) << r.err;
        EXPECT_TRUE(r.out.empty());
    }
}

TEST_F(CliTest, DiscoverRefusesSirKnownWithoutDirectedFaithfulness) {
    const auto r = run({"discover", xor_chain, "--algo", "sir", "--mode", "known"});
    EXPECT_EQ(r.code, kExitAssumption);
    EXPECT_NE(r.err.find("directed_faithfulness"), std::string::npos);
}

TEST_F(CliTest, UnsafeRunsAndLabelsOutput) {
    const auto r = run({"discover", xor_chain, "--algo", "sour", "--mode", "monotone", "--unsafe"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("no correctness guarantee"), std::string::npos);
    const auto k = run({"discover", xor_chain, "--algo", "sir", "--mode", "known", "--unsafe"});
    ASSERT_EQ(k.code, kExitOk);
    EXPECT_NE(k.out.find("layer 1: A\nlayer 2: B,C\n"), std::string::npos) << k.out;
}

TEST_F(CliTest, UnsafeSourOnXorGivesAnInvalidLayering) {
    // C = B xor fair coin has H(C) = H(N_C), so C passes as a source.
    const auto r = run({"discover", xor_chain, "--algo", "sour", "--mode", "known", "--unsafe"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("layer 1: A,C\nlayer 2: B\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, KnownModeViolationExitsTwo) {
    std::string text = read_file(affine_chain);
    text.erase(text.find_last_of('}'));
    text += ", \"metadata\": {\"known_noise_entropies\": [5, 5, 5]}}\n";
    write_file(path("wrong.json"), text);
    const auto r = run({"discover", path("wrong.json"), "--algo", "sour", "--mode", "known"});
    EXPECT_EQ(r.code, kExitAssumption) << r.out;
    EXPECT_NE(r.err.find("assumption violation"), std::string::npos) << r.err;
    EXPECT_NE(r.out.find("iter 1: candidates"), std::string::npos) << r.out;
}

TEST_F(CliTest, DiscoverWithDataNeedsTolAndIsUnguaranteed) {
    ASSERT_EQ(run({"sample", affine_chain, "-n", "20000", "--seed", "3", "-o", path("d.csv")}).code,
              kExitOk);
    EXPECT_EQ(run({"discover", affine_chain, "--algo", "sour", "--mode", "monotone", "--data",
                   path("d.csv")})
                  .code,
              kExitUsage);
    const auto r = run({"discover", affine_chain, "--algo", "sour", "--mode", "monotone", "--data",
                        path("d.csv"), "--tol", "0.05"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("no correctness guarantee"), std::string::npos);
    EXPECT_NE(r.out.find("layer 1: A\nlayer 2: B\nlayer 3: C\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, DiscoverUsageErrors) {
    EXPECT_EQ(run({"discover", affine_chain, "--algo", "rr", "--mode", "known"}).code, kExitUsage);
    EXPECT_EQ(run({"discover", affine_chain, "--algo", "sour", "--mode", "fast"}).code, kExitUsage);
    EXPECT_EQ(run({"discover", affine_chain, "--algo", "sour"}).code, kExitUsage);
    EXPECT_EQ(run({"discover", path("missing.json"), "--algo", "sour", "--mode", "known"}).code,
              kExitUsage);
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(CliTest, CheckXorChain) {
    const auto r = run({"check", xor_chain});
    ASSERT_EQ(r.code, kExitOk) << r.out;
    EXPECT_NE(r.out.find("equal v=B S={A} H=0.811278124 Hnoise=0.811278124 PASS"),
              std::string::npos)
        << r.out;
    EXPECT_EQ(r.out.find("strict_lower v=B S={} H=0.896038233 Hnoise=0.811278124 PASS"),
              std::string::npos);
    EXPECT_NE(r.out.find("strict_lower v=B S={} H=0.896038233 Hnoise=0.811278124 SKIP"),
              std::string::npos);
    EXPECT_NE(r.out.find("discovery sour known SKIP"), std::string::npos);
    EXPECT_NE(r.out.find("discovery sir monotone layering {A} {B} {C} calls=6 PASS"),
              std::string::npos)
        << r.out;
    EXPECT_NE(r.out.find("summary: pass="), std::string::npos);
}

TEST_F(CliTest, CheckAffineChainAssertsStrictLower) {
    const auto r = run({"check", affine_chain});
    ASSERT_EQ(r.code, kExitOk) << r.out;
    EXPECT_NE(r.out.find("strict_lower v=B S={} H=1.354842568 Hnoise=0.811278124 PASS"),
              std::string::npos)
        << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, CheckMachineAndDiagnostics) {
    const auto r = run({"check", affine_chain, "--machine", "--samples", "5000"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("status=ok\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("diagnostic_summary: samples=5000"), std::string::npos);
}

TEST_F(CliTest, CheckCorruptFile) {
    write_file(path("bad.json"), "{\"nodes\": [");
    const auto r = run({"check", path("bad.json")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("parse error"), std::string::npos) << r.err;
}

TEST_F(CliTest, SampleAndJoint) {
    const auto s1 = run({"sample", xor_chain, "-n", "10", "--seed", "4"});
    const auto s2 = run({"sample", xor_chain, "-n", "10", "--seed", "4"});
    ASSERT_EQ(s1.code, kExitOk);
    EXPECT_EQ(s1.out, s2.out);
    EXPECT_EQ(s1.out.rfind("A,B,C\n", 0), 0u);

    const auto j = run({"joint", xor_chain});
    ASSERT_EQ(j.code, kExitOk);
    EXPECT_NE(j.out.find("A=0,B=0,C=0 : 21/64\n"), std::string::npos) << j.out;
    const auto jn = run({"joint", xor_chain, "--noise"});
    EXPECT_NE(jn.out.find("N_C="), std::string::npos);
}

TEST_F(CliTest, LayerKnownGraph) {
    write_file(path("g.txt"), "nodes: A,B,C,D\nedge: A -> B\nedge: A -> C\nedge: B -> D\nedge: C -> D\n");
    const auto r = run({"layer", path("g.txt"), "--method", "sir"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, "layer 1: A\nlayer 2: B,C\nlayer 3: D\n");
    EXPECT_EQ(run({"layer", path("g.txt"), "--method", "zig"}).code, kExitUsage);
}

}  // namespace
}  // namespace entlayer
