#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entlayer/discovery.hpp"
#include "entlayer/graph.hpp"
#include "entlayer/oracle.hpp"
#include "entlayer/scm.hpp"

namespace entlayer {

// Entropy bound clauses relating H(v|S) to H(N_v):
//   weak_upper    Par(v) in S                                  H(v|S) <= H(N_v)
//   equal         Par(v) in S, no descendant of v in S          H(v|S) == H(N_v)
//   strict_upper  Par(v) in S, some descendant of v in S        H(v|S) <  H(N_v)
//   strict_lower  some parent p outside S with Des(p) disjoint
//                 from S u Par(v)                               H(v|S) >  H(N_v)
enum class Clause { weak_upper, equal, strict_upper, strict_lower };

std::string to_string(Clause c);

struct ClauseMatch {
    std::vector<Clause> clauses;
    /// Parent p certifying strict_lower, smallest id first.
    std::optional<NodeId> witness;
};

ClauseMatch classify_case(const Dag& g, NodeId v, const NodeSet& s);

enum class Verdict { pass, fail, skip };
std::string to_string(Verdict v);

struct Tally {
    std::size_t pass = 0;
    std::size_t fail = 0;
    std::size_t skip = 0;
    bool ok() const { return fail == 0; }
};

struct BoundCheckCase {
    NodeId node{};
    NodeSet conditioning;
    std::optional<Clause> clause;  // nullopt: no clause applies
    double measured = 0.0;         // H(v|S)
    double noise_entropy = 0.0;    // H(N_v)
    Verdict verdict = Verdict::skip;
};

/// Premises the bound clauses rely on; a clause whose premise fails is
/// recorded as SKIP.
struct BoundPremises {
    bool injective_noise = false;
    bool injective_noise_plus_one = false;
    bool nonconstant_noise = false;
    bool directed_faithfulness = false;
};

BoundPremises establish_premises(const Scm& m);

struct BoundsOptions {
    std::size_t budget = 2000;  // random (v, S) draws when |V| is large
    std::uint64_t seed = 0;
    std::size_t exhaustive_max_nodes = 5;
    double margin = 1e-9;
};

/// (v, S) pairs: exhaustive for small graphs, otherwise `budget` random
/// draws. Deterministic in (seed, budget).
std::vector<std::pair<NodeId, NodeSet>> bound_cases(const Dag& g, const BoundsOptions& opt);

std::vector<BoundCheckCase> check_entropy_bounds(const Scm& m, const EntropyOracle& oracle,
                                                 const BoundPremises& premises,
                                                 const BoundsOptions& opt = {});
std::vector<BoundCheckCase> check_entropy_bounds(const Scm& m, const EntropyOracle& oracle,
                                                 const BoundsOptions& opt = {});

/// `<clause> v=<label> S={labels} H=<bits> Hnoise=<bits> <PASS|FAIL|SKIP>`
std::string format_case(const BoundCheckCase& c, std::span<const std::string> labels);

struct NoiseIndependenceCase {
    NodeId node{};
    NodeSet conditioning;
    bool separated = false;
    double mutual_information = 0.0;  // I(N_v; S)
    Verdict verdict = Verdict::skip;
};

/// For every v and non-empty S in V - {v}: when Des(v) and S are disjoint,
/// N_v must be d-separated from S in the explicit noise graph and
/// I(N_v; S) <= 1e-9. Other cases are SKIP. `noise_oracle` covers the
/// noise-inclusive joint.
std::vector<NoiseIndependenceCase> check_noise_independence(const Scm& m, const EntropyOracle& noise_oracle,
                                     const BoundsOptions& opt = {});
std::vector<NoiseIndependenceCase> check_noise_independence(const Scm& m, const BoundsOptions& opt = {});

std::string format_case(const NoiseIndependenceCase& c, std::span<const std::string> labels);

Tally tally(std::span<const BoundCheckCase> cases);
Tally tally(std::span<const NoiseIndependenceCase> cases);

struct TruthReport {
    bool ok = true;
    std::optional<std::size_t> bad_iteration;  // 1-based
    std::string reason;
};

/// The layering must be valid for `truth` and every selected set must
/// consist of residual sources (SOUR) or sinks (SIR).
TruthReport check_discovery_against_truth(const Dag& truth, const DiscoveryResult& result);

/// Known-entropy runs: the qualifying set of every iteration equals the
/// residual source (SOUR) or sink (SIR) set exactly.
TruthReport check_equality_sets(const Dag& truth, const DiscoveryResult& result);

/// oracle_calls <= n(n+1)/2.
bool check_call_bound(const DiscoveryResult& result, std::size_t n);

}  // namespace entlayer
