#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "entlayer/graph.hpp"
#include "entlayer/oracle.hpp"

namespace entlayer {

inline constexpr double kDiscoveryTolerance = 1e-9;

/// Noise entropies are disclosed; a node qualifies when its conditional
/// entropy matches its own noise entropy within tol.
struct KnownNoiseEntropy {
    std::map<NodeId, double> entropies;
    double tol = kDiscoveryTolerance;
};

/// Noise entropies unknown but monotone along directed paths; qualifying
/// nodes are those within tol of the extremum.
struct MonotoneEntropy {
    double tol = kDiscoveryTolerance;
};

using DiscoveryMode = std::variant<KnownNoiseEntropy, MonotoneEntropy>;

enum class Algorithm { sour, sir };

struct DiscoveryOptions {
    /// Remove only the smallest-id qualifying node per iteration instead of
    /// the whole qualifying set.
    bool one_at_a_time = false;
    /// False for runs whose premises were not established (unsafe CLI runs,
    /// empirical oracles); carried through to the result.
    bool guaranteed = true;
};

struct IterationTrace {
    NodeSet remaining;                   // V_cur at the start of the iteration
    std::map<NodeId, double> entropies;  // conditional entropy per candidate
    NodeSet qualifying;                  // nodes passing the selection rule
    NodeSet selected;                    // nodes removed this iteration
};

struct DiscoveryResult {
    Algorithm algorithm = Algorithm::sour;
    bool known_entropies = false;
    bool guaranteed = true;
    Layering layering;
    std::size_t oracle_calls = 0;
    std::vector<IterationTrace> trace;
};

/// Raised when known-entropy selection finds no qualifying node, i.e. the
/// SCM behind the oracle breaks a premise of the algorithm.
class AssumptionViolation : public std::runtime_error {
public:
    AssumptionViolation(const std::string& what, DiscoveryResult partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const DiscoveryResult& partial() const { return partial_; }

private:
    DiscoveryResult partial_;
};

/// Repeated source removal using H(v | V - V_cur).
DiscoveryResult sour_discover(const NodeSet& nodes, const EntropyOracle& oracle,
                              const DiscoveryMode& mode, const DiscoveryOptions& options = {});

/// Repeated sink removal using H(v | V_cur - {v}).
DiscoveryResult sir_discover(const NodeSet& nodes, const EntropyOracle& oracle,
                             const DiscoveryMode& mode, const DiscoveryOptions& options = {});

DiscoveryResult discover(Algorithm algorithm, const NodeSet& nodes, const EntropyOracle& oracle,
                         const DiscoveryMode& mode, const DiscoveryOptions& options = {});

std::string to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

/// Layering lines, `oracle_calls: <n>`, then one line per iteration:
/// `iter <k>: candidates {label: bits, ...} selected {labels}`.
std::string format_discovery(const DiscoveryResult& r, std::span<const std::string> labels);

}  // namespace entlayer
