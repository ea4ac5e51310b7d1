#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "entlayer/graph.hpp"
#include "entlayer/rational.hpp"
#include "entlayer/scm.hpp"

namespace entlayer {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Probability mass over full assignments of `variables`. Zero-mass
/// assignments are never stored.
class JointTable {
public:
    using Assignment = std::vector<Value>;

    JointTable(std::vector<NodeId> variables, std::vector<std::string> labels,
               std::map<Assignment, Rational> entries);

    const std::vector<NodeId>& variables() const { return variables_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::map<Assignment, Rational>& entries() const { return entries_; }

    /// True when the mass sums to exactly 1.
    bool exact() const { return exact_; }
    Rational total() const;

    std::optional<std::size_t> position(NodeId v) const;
    bool covers(NodeId v) const { return position(v).has_value(); }

    std::map<Assignment, Rational> project(const std::vector<std::size_t>& positions) const;
    JointTable marginal(const NodeSet& keep) const;

    /// Entropy of the full table in bits.
    double entropy() const;

private:
    std::vector<NodeId> variables_;
    std::vector<std::string> labels_;
    std::map<Assignment, Rational> entries_;
    bool exact_ = true;
};

/// Default cap on the number of noise tuples joint_distribution enumerates;
/// ENTLAYER_BUDGET overrides 2^24.
std::uint64_t default_enumeration_budget();

/// Exact joint by enumerating every noise tuple. Observed variables keep
/// their ids; with include_noise, N_v is added as m.noise_node(v).
JointTable joint_distribution(const Scm& m, bool include_noise,
                              std::uint64_t budget = default_enumeration_budget());

/// Plug-in relative frequencies; column i becomes NodeId i.
JointTable empirical_joint(const Dataset& d);

/// `<v1>=<val>,...,<vk>=<val> : <prob>` rows in assignment order.
std::string format_joint(const JointTable& t);

/// Conditional-entropy oracle H(X|S), in bits.
class EntropyOracle {
public:
    virtual ~EntropyOracle() = default;
    virtual double cond_entropy(const NodeSet& x, const NodeSet& s) const = 0;
    virtual bool covers(NodeId v) const = 0;
};

/// Oracle backed by a JointTable. Marginal entropies are memoized per
/// variable set; safe for concurrent queries.
class TableOracle final : public EntropyOracle {
public:
    explicit TableOracle(JointTable table);

    double cond_entropy(const NodeSet& x, const NodeSet& s) const override;
    bool covers(NodeId v) const override { return table_.covers(v); }

    double joint_entropy(const NodeSet& vars) const;
    const JointTable& table() const { return table_; }

private:
    std::uint64_t mask_of(const NodeSet& vars) const;
    double entropy_of_mask(std::uint64_t mask) const;

    JointTable table_;
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<std::uint64_t, double> cache_;
};

/// Forwards to another oracle and counts cond_entropy calls.
class CountingOracle final : public EntropyOracle {
public:
    explicit CountingOracle(const EntropyOracle& inner) : inner_(inner) {}

    double cond_entropy(const NodeSet& x, const NodeSet& s) const override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.cond_entropy(x, s);
    }
    bool covers(NodeId v) const override { return inner_.covers(v); }

    std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }

private:
    const EntropyOracle& inner_;
    mutable std::atomic<std::size_t> calls_{0};
};

inline constexpr double kIndependenceTolerance = 1e-9;

/// I(X;Y|S) = H(X|S) - H(X|Y u S).
double mutual_information(const EntropyOracle& o, const NodeSet& x, const NodeSet& y,
                          const NodeSet& s);
bool is_independent(const EntropyOracle& o, const NodeSet& x, const NodeSet& y, const NodeSet& s,
                    double tol = kIndependenceTolerance);

}  // namespace entlayer
