#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "entlayer/graph.hpp"
#include "entlayer/rational.hpp"

namespace entlayer {

using Value = std::int64_t;

class ScmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exact probability together with the text it was written as, so that
/// files round-trip without rewriting "0.25" as "1/4".
class Probability {
public:
    Probability() = default;
    explicit Probability(Rational value);
    static Probability parse(std::string_view text);

    const Rational& value() const { return value_; }
    const std::string& text() const { return text_; }
    bool is_decimal() const { return decimal_; }

    bool operator==(const Probability& other) const { return value_ == other.value_; }

private:
    Rational value_;
    std::string text_;
    bool decimal_ = false;
};

struct Pmf {
    std::vector<Value> support;
    std::vector<Probability> probs;

    static Pmf uniform(std::size_t k);
    static Pmf bernoulli(const Rational& p_one);

    /// Throws ScmError unless probs are non-negative, support values are
    /// distinct and the mass sums to 1 (exactly, or within 1e-12 when any
    /// probability was written as a decimal).
    void validate() const;
    bool exact() const;
    std::size_t effective_support() const;
    std::vector<Value> positive_support() const;
    bool operator==(const Pmf&) const = default;
};

/// Shannon entropy in bits.
double entropy_bits(const Pmf& pmf);

struct TableRow {
    std::vector<Value> parents;
    Value noise = 0;
    Value out = 0;
};

/// Structural function f_v as an explicit lookup table keyed by
/// (parent values in parent_order, noise value).
class StructuralTable {
public:
    using Key = std::pair<std::vector<Value>, Value>;

    StructuralTable() = default;
    StructuralTable(std::vector<NodeId> parent_order, const std::vector<TableRow>& rows);

    const std::vector<NodeId>& parent_order() const { return parent_order_; }
    const std::map<Key, Value>& rows() const { return rows_; }

    std::optional<Value> lookup(const std::vector<Value>& parents, Value noise) const;
    Value at(const std::vector<Value>& parents, Value noise) const;

    bool operator==(const StructuralTable&) const = default;

private:
    std::vector<NodeId> parent_order_;
    std::map<Key, Value> rows_;
};

enum class Profile { base, plus_one, sir_faithful };
enum class EntropyOrder { known, weak, strict };
enum class FaithfulnessScope { unchecked, singleton, exhaustive };

std::string to_string(Profile p);
std::string to_string(EntropyOrder e);
std::string to_string(FaithfulnessScope f);
Profile parse_profile(std::string_view s);
EntropyOrder parse_entropy_order(std::string_view s);
FaithfulnessScope parse_faithfulness_scope(std::string_view s);

struct ScmMetadata {
    std::optional<Profile> profile;
    std::optional<EntropyOrder> entropy;
    FaithfulnessScope faithfulness = FaithfulnessScope::unchecked;
    std::optional<std::uint64_t> seed;
    /// Per-node noise entropies disclosed to discovery in known-entropy runs.
    std::vector<double> known_noise_entropies;

    bool operator==(const ScmMetadata&) const = default;
};

/// Discrete structural causal model v = f_v(Par(v), N_v).
///
/// The graph's registry must equal its node set (ids 0..n-1). Structural
/// tables must be defined for every parent-value tuple that occurs with
/// positive probability, paired with every noise support value, and their
/// outputs must lie in the node's alphabet. Non-constant noise is not
/// enforced here; check_nonconstant_noise reports it.
class Scm {
public:
    Scm(Dag graph, std::vector<std::vector<Value>> alphabets, std::vector<Pmf> noise,
        std::vector<StructuralTable> functions, ScmMetadata metadata = {});

    const Dag& graph() const { return graph_; }
    std::size_t size() const { return graph_.size(); }
    const std::string& label(NodeId v) const { return graph_.label(v); }
    const std::vector<Value>& alphabet(NodeId v) const { return alphabets_.at(index_of(v)); }
    const Pmf& noise(NodeId v) const { return noise_.at(index_of(v)); }
    const StructuralTable& function(NodeId v) const { return functions_.at(index_of(v)); }
    const ScmMetadata& metadata() const { return metadata_; }
    const std::vector<NodeId>& order() const { return order_; }

    /// Id of N_v in explicit_noise_graph() and in noise-inclusive joints.
    NodeId noise_node(NodeId v) const { return node_id(size() + index_of(v)); }

    /// Evaluates every node in topological order for one noise assignment
    /// (indexed by node id).
    std::vector<Value> evaluate(std::span<const Value> noise_values) const;

    bool operator==(const Scm& other) const {
        return graph_ == other.graph_ && alphabets_ == other.alphabets_ &&
               noise_ == other.noise_ && functions_ == other.functions_ &&
               metadata_ == other.metadata_;
    }

private:
    Dag graph_;
    std::vector<std::vector<Value>> alphabets_;
    std::vector<Pmf> noise_;
    std::vector<StructuralTable> functions_;
    ScmMetadata metadata_;
    std::vector<NodeId> order_;
};

/// Causal graph plus one node N_<label> per variable with the single edge
/// N_v -> v. Noise node ids are n + index_of(v).
Dag explicit_noise_graph(const Scm& m);

struct AssumptionReport {
    std::string id;
    bool holds = true;
    std::vector<std::string> witnesses;
};

AssumptionReport check_injective_noise(const Scm& m);
AssumptionReport check_injective_noise_plus_one(const Scm& m);
AssumptionReport check_nonconstant_noise(const Scm& m);

enum class Monotonicity { weak, strict };
inline constexpr double kEntropyOrderTolerance = 1e-12;

/// Noise entropies must not decrease (weak) or must increase (strict)
/// along every directed path.
AssumptionReport check_noise_entropy_order(const Scm& m, Monotonicity mode);

double noise_entropy(const Scm& m, NodeId v);
std::vector<double> noise_entropies(const Scm& m);

struct Dataset {
    std::vector<std::string> labels;
    std::vector<std::vector<Value>> rows;
};

/// n i.i.d. draws of the observed variables; deterministic for a seed.
Dataset sample(const Scm& m, std::uint64_t seed, std::size_t n);

}  // namespace entlayer
