#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace entlayer {

// Index into a graph's label registry. Residual graphs keep the registry of
// the graph they were cut from, so ids stay valid across residual().
enum class NodeId : std::uint32_t {};

constexpr std::size_t index_of(NodeId v) { return static_cast<std::size_t>(v); }
constexpr NodeId node_id(std::size_t i) { return static_cast<NodeId>(i); }

using NodeSet = std::set<NodeId>;

struct Edge {
    NodeId from;
    NodeId to;
    auto operator<=>(const Edge&) const = default;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable directed acyclic graph over a subset of a label registry.
class Dag {
public:
    Dag() = default;

    /// Every label becomes a node; NodeId i names labels[i].
    /// Throws GraphError on duplicate/invalid labels, self-loops, 2-cycles
    /// or any directed cycle.
    Dag(std::vector<std::string> labels, const std::vector<Edge>& edges);

    static Dag from_labels(std::vector<std::string> labels,
                           const std::vector<std::pair<std::string, std::string>>& edges);

    const std::vector<std::string>& registry() const { return labels_; }
    const std::string& label(NodeId v) const;
    std::optional<NodeId> find(std::string_view label) const;
    NodeId id_of(std::string_view label) const;

    const NodeSet& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    bool contains(NodeId v) const { return nodes_.count(v) != 0; }

    const std::set<Edge>& edges() const { return edges_; }
    bool has_edge(NodeId from, NodeId to) const { return edges_.count({from, to}) != 0; }

    // Unchecked adjacency; callers validate membership first.
    const NodeSet& parents_of(NodeId v) const { return parents_[index_of(v)]; }
    const NodeSet& children_of(NodeId v) const { return children_[index_of(v)]; }

    void require(NodeId v) const;
    void require_all(const NodeSet& vs) const;

    bool operator==(const Dag& other) const {
        return labels_ == other.labels_ && nodes_ == other.nodes_ && edges_ == other.edges_;
    }

private:
    friend Dag residual(const Dag& g, const NodeSet& keep);

    Dag(std::vector<std::string> labels, NodeSet nodes, std::set<Edge> edges);
    void index_edges();

    std::vector<std::string> labels_;
    NodeSet nodes_;
    std::set<Edge> edges_;
    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
};

NodeSet parents(const Dag& g, NodeId v);
NodeSet children(const Dag& g, NodeId v);
NodeSet descendants(const Dag& g, NodeId v);
NodeSet ancestors(const Dag& g, NodeId v);
NodeSet sources(const Dag& g);
NodeSet sinks(const Dag& g);

/// Induced subgraph on `keep`; keep must be a subset of g.nodes().
Dag residual(const Dag& g, const NodeSet& keep);

/// Parents p of v with descendants(p) disjoint from parents(v).
NodeSet unmediated_parents(const Dag& g, NodeId v);

/// Kahn order, smallest id first among ready nodes.
std::vector<NodeId> topological_order(const Dag& g);

struct Layering {
    std::vector<NodeSet> layers;

    std::size_t size() const { return layers.size(); }
    bool empty() const { return layers.empty(); }
    NodeSet nodes() const;
    bool operator==(const Layering&) const = default;
};

struct LayeringReport {
    bool valid = false;
    std::string reason;
};

LayeringReport check_layering(const Dag& g, const Layering& l);
bool is_layering(const Dag& g, const Layering& l);

/// d-separation of X and Y given S by a reachability sweep over
/// (node, direction) states. X, Y, S pairwise disjoint, X and Y non-empty.
bool d_separated(const Dag& g, const NodeSet& x, const NodeSet& y, const NodeSet& s);

// Choice functions for RR/SOUR/SIR.
using SubsetSelector = std::function<NodeSet(const NodeSet& candidates)>;

struct Selection {
    NodeSet sources;
    NodeSet sinks;
};
using NodeSelector = std::function<Selection(const NodeSet& sources, const NodeSet& sinks)>;

SubsetSelector take_all();
SubsetSelector take_none();
/// First k candidates ordered by label.
SubsetSelector take_first_k(std::vector<std::string> labels, std::size_t k);
NodeSelector combine(SubsetSelector from_sources, SubsetSelector from_sinks);

Layering rr(const Dag& g, const NodeSelector& select);
Layering sour_graph(const Dag& g, const SubsetSelector& select_sources);
Layering sir_graph(const Dag& g, const SubsetSelector& select_sinks);

std::string format_set(const NodeSet& s, std::span<const std::string> labels);

}  // namespace entlayer
