#include "entlayer/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace entlayer {

namespace {

bool valid_label(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '.' || c == '-';
    });
}

}  // namespace

Dag::Dag(std::vector<std::string> labels, NodeSet nodes, std::set<Edge> edges)
    : labels_(std::move(labels)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
    index_edges();
}

Dag::Dag(std::vector<std::string> labels, const std::vector<Edge>& edges)
    : labels_(std::move(labels)) {
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!valid_label(labels_[i])) {
            throw GraphError("invalid node label '" + labels_[i] + "'");
        }
        if (!seen.insert(labels_[i]).second) {
            throw GraphError("duplicate node label '" + labels_[i] + "'");
        }
        nodes_.insert(node_id(i));
    }
    for (const Edge& e : edges) {
        if (index_of(e.from) >= labels_.size() || index_of(e.to) >= labels_.size()) {
            throw GraphError("edge endpoint outside the node set");
        }
        if (e.from == e.to) {
            throw GraphError("self-loop on '" + labels_[index_of(e.from)] + "'");
        }
        if (edges_.count({e.to, e.from}) != 0) {
            throw GraphError("both directions present between '" + labels_[index_of(e.from)] +
                             "' and '" + labels_[index_of(e.to)] + "'");
        }
        edges_.insert(e);
    }
    index_edges();
    if (topological_order(*this).size() != nodes_.size()) {
        throw GraphError("graph contains a directed cycle");
    }
}

Dag Dag::from_labels(std::vector<std::string> labels,
                     const std::vector<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, NodeId, std::less<>> ids;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ids.emplace(labels[i], node_id(i));
    }
    std::vector<Edge> es;
    es.reserve(edges.size());
    for (const auto& [from, to] : edges) {
        auto f = ids.find(from);
        auto t = ids.find(to);
        if (f == ids.end() || t == ids.end()) {
            throw GraphError("edge " + from + " -> " + to + " names an unknown node");
        }
        es.push_back({f->second, t->second});
    }
    return Dag(std::move(labels), es);
}

void Dag::index_edges() {
    parents_.assign(labels_.size(), {});
    children_.assign(labels_.size(), {});
    for (const Edge& e : edges_) {
        parents_[index_of(e.to)].insert(e.from);
        children_[index_of(e.from)].insert(e.to);
    }
}

const std::string& Dag::label(NodeId v) const {
    if (index_of(v) >= labels_.size()) {
        throw GraphError("node id " + std::to_string(index_of(v)) + " outside the registry");
    }
    return labels_[index_of(v)];
}

std::optional<NodeId> Dag::find(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label && nodes_.count(node_id(i)) != 0) {
            return node_id(i);
        }
    }
    return std::nullopt;
}

NodeId Dag::id_of(std::string_view label) const {
    if (auto v = find(label)) {
        return *v;
    }
    throw GraphError("unknown node '" + std::string(label) + "'");
}

void Dag::require(NodeId v) const {
    if (!contains(v)) {
        throw GraphError("unknown node id " + std::to_string(index_of(v)));
    }
}

void Dag::require_all(const NodeSet& vs) const {
    for (NodeId v : vs) {
        require(v);
    }
}

NodeSet parents(const Dag& g, NodeId v) {
    g.require(v);
    return g.parents_of(v);
}

NodeSet children(const Dag& g, NodeId v) {
    g.require(v);
    return g.children_of(v);
}

namespace {

template <typename Next>
NodeSet closure(NodeId start, Next next) {
    NodeSet out;
    std::vector<NodeId> stack{start};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId w : next(u)) {
            if (out.insert(w).second) {
                stack.push_back(w);
            }
        }
    }
    out.erase(start);
    return out;
}

}  // namespace

NodeSet descendants(const Dag& g, NodeId v) {
    g.require(v);
    return closure(v, [&](NodeId u) -> const NodeSet& { return g.children_of(u); });
}

NodeSet ancestors(const Dag& g, NodeId v) {
    g.require(v);
    return closure(v, [&](NodeId u) -> const NodeSet& { return g.parents_of(u); });
}

NodeSet sources(const Dag& g) {
    NodeSet out;
    for (NodeId v : g.nodes()) {
        if (g.parents_of(v).empty()) {
            out.insert(v);
        }
    }
    return out;
}

NodeSet sinks(const Dag& g) {
    NodeSet out;
    for (NodeId v : g.nodes()) {
        if (g.children_of(v).empty()) {
            out.insert(v);
        }
    }
    return out;
}

Dag residual(const Dag& g, const NodeSet& keep) {
    for (NodeId v : keep) {
        if (!g.contains(v)) {
            throw GraphError("residual: node id " + std::to_string(index_of(v)) +
                             " is not in the graph");
        }
    }
    std::set<Edge> edges;
    for (const Edge& e : g.edges()) {
        if (keep.count(e.from) != 0 && keep.count(e.to) != 0) {
            edges.insert(e);
        }
    }
    return Dag(g.registry(), keep, std::move(edges));
}

NodeSet unmediated_parents(const Dag& g, NodeId v) {
    g.require(v);
    const NodeSet& par = g.parents_of(v);
    NodeSet out;
    for (NodeId p : par) {
        NodeSet des = descendants(g, p);
        bool mediated = std::any_of(par.begin(), par.end(),
                                    [&](NodeId q) { return des.count(q) != 0; });
        if (!mediated) {
            out.insert(p);
        }
    }
    return out;
}

std::vector<NodeId> topological_order(const Dag& g) {
    std::vector<std::size_t> indegree(g.registry().size(), 0);
    for (const Edge& e : g.edges()) {
        ++indegree[index_of(e.to)];
    }
    std::set<NodeId> ready;
    for (NodeId v : g.nodes()) {
        if (indegree[index_of(v)] == 0) {
            ready.insert(v);
        }
    }
    std::vector<NodeId> order;
    order.reserve(g.size());
    while (!ready.empty()) {
        NodeId v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (NodeId c : g.children_of(v)) {
            if (--indegree[index_of(c)] == 0) {
                ready.insert(c);
            }
        }
    }
    return order;
}

NodeSet Layering::nodes() const {
    NodeSet out;
    for (const auto& layer : layers) {
        out.insert(layer.begin(), layer.end());
    }
    return out;
}

LayeringReport check_layering(const Dag& g, const Layering& l) {
    const auto& labels = g.registry();
    auto name = [&](NodeId v) {
        return index_of(v) < labels.size() ? labels[index_of(v)]
                                           : "#" + std::to_string(index_of(v));
    };
    std::map<NodeId, std::size_t> layer_of;
    for (std::size_t i = 0; i < l.layers.size(); ++i) {
        if (l.layers[i].empty()) {
            return {false, "layer " + std::to_string(i + 1) + " is empty"};
        }
        for (NodeId v : l.layers[i]) {
            if (!g.contains(v)) {
                return {false, "node " + name(v) + " is not in the graph"};
            }
            if (!layer_of.emplace(v, i).second) {
                return {false, "node " + name(v) + " appears in more than one layer"};
            }
        }
    }
    for (NodeId v : g.nodes()) {
        if (layer_of.count(v) == 0) {
            return {false, "node " + name(v) + " is missing from the layering"};
        }
    }
    for (const Edge& e : g.edges()) {
        if (layer_of[e.from] >= layer_of[e.to]) {
            return {false, "edge " + name(e.from) + " -> " + name(e.to) + " goes from layer " +
                               std::to_string(layer_of[e.from] + 1) + " to layer " +
                               std::to_string(layer_of[e.to] + 1)};
        }
    }
    return {true, {}};
}

bool is_layering(const Dag& g, const Layering& l) { return check_layering(g, l).valid; }

bool d_separated(const Dag& g, const NodeSet& x, const NodeSet& y, const NodeSet& s) {
    g.require_all(x);
    g.require_all(y);
    g.require_all(s);
    if (x.empty() || y.empty()) {
        throw GraphError("d_separated: X and Y must be non-empty");
    }
    auto overlaps = [](const NodeSet& a, const NodeSet& b) {
        return std::any_of(a.begin(), a.end(), [&](NodeId v) { return b.count(v) != 0; });
    };
    if (overlaps(x, y) || overlaps(x, s) || overlaps(y, s)) {
        throw GraphError("d_separated: X, Y and S must be pairwise disjoint");
    }

    // Colliders are open iff they are in S or have a descendant in S, i.e.
    // iff they belong to S together with its ancestors.
    NodeSet s_or_ancestor = s;
    for (NodeId v : s) {
        NodeSet anc = ancestors(g, v);
        s_or_ancestor.insert(anc.begin(), anc.end());
    }

    // Directions: `up` = entered from a child, `down` = entered from a parent.
    enum Dir : std::size_t { up = 0, down = 1 };
    const std::size_t n = g.registry().size();
    std::vector<char> visited(2 * n, 0);
    std::deque<std::pair<NodeId, Dir>> queue;
    for (NodeId v : x) {
        queue.emplace_back(v, up);
    }
    while (!queue.empty()) {
        auto [v, dir] = queue.front();
        queue.pop_front();
        char& seen = visited[2 * index_of(v) + dir];
        if (seen) {
            continue;
        }
        seen = 1;
        const bool observed = s.count(v) != 0;
        if (!observed && y.count(v) != 0) {
            return false;
        }
        if (dir == up) {
            if (observed) {
                continue;
            }
            for (NodeId p : g.parents_of(v)) {
                queue.emplace_back(p, up);
            }
            for (NodeId c : g.children_of(v)) {
                queue.emplace_back(c, down);
            }
        } else {
            if (!observed) {
                for (NodeId c : g.children_of(v)) {
                    queue.emplace_back(c, down);
                }
            }
            if (s_or_ancestor.count(v) != 0) {
                for (NodeId p : g.parents_of(v)) {
                    queue.emplace_back(p, up);
                }
            }
        }
    }
    return true;
}

SubsetSelector take_all() {
    return [](const NodeSet& candidates) { return candidates; };
}

SubsetSelector take_none() {
    return [](const NodeSet&) { return NodeSet{}; };
}

SubsetSelector take_first_k(std::vector<std::string> labels, std::size_t k) {
    return [labels = std::move(labels), k](const NodeSet& candidates) {
        std::vector<NodeId> sorted(candidates.begin(), candidates.end());
        std::sort(sorted.begin(), sorted.end(), [&](NodeId a, NodeId b) {
            return labels.at(index_of(a)) < labels.at(index_of(b));
        });
        if (sorted.size() > k) {
            sorted.resize(k);
        }
        return NodeSet(sorted.begin(), sorted.end());
    };
}

NodeSelector combine(SubsetSelector from_sources, SubsetSelector from_sinks) {
    return [from_sources = std::move(from_sources), from_sinks = std::move(from_sinks)](
               const NodeSet& src, const NodeSet& snk) {
        return Selection{from_sources(src), from_sinks(snk)};
    };
}

Layering rr(const Dag& g, const NodeSelector& select) {
    NodeSet current = g.nodes();
    std::vector<NodeSet> front;
    std::deque<NodeSet> back;
    while (!current.empty()) {
        Dag res = residual(g, current);
        NodeSet src = sources(res);
        NodeSet snk = sinks(res);
        Selection chosen = select(src, snk);
        if (!std::includes(src.begin(), src.end(), chosen.sources.begin(), chosen.sources.end())) {
            throw GraphError("selector returned a node that is not a current source");
        }
        if (!std::includes(snk.begin(), snk.end(), chosen.sinks.begin(), chosen.sinks.end())) {
            throw GraphError("selector returned a node that is not a current sink");
        }
        if (chosen.sources.empty() && chosen.sinks.empty()) {
            throw GraphError("selector returned no nodes");
        }
        // A node that is both a source and a sink goes to the front only.
        for (NodeId v : chosen.sources) {
            chosen.sinks.erase(v);
        }
        if (!chosen.sources.empty()) {
            front.push_back(chosen.sources);
        }
        if (!chosen.sinks.empty()) {
            back.push_front(chosen.sinks);
        }
        for (NodeId v : chosen.sources) {
            current.erase(v);
        }
        for (NodeId v : chosen.sinks) {
            current.erase(v);
        }
    }
    Layering out;
    out.layers = std::move(front);
    out.layers.insert(out.layers.end(), back.begin(), back.end());
    return out;
}

Layering sour_graph(const Dag& g, const SubsetSelector& select_sources) {
    auto select = [&](const NodeSet& src, const NodeSet&) {
        Selection s{select_sources(src), {}};
        if (s.sources.empty()) {
            throw GraphError("source selector returned no nodes");
        }
        return s;
    };
    return rr(g, select);
}

Layering sir_graph(const Dag& g, const SubsetSelector& select_sinks) {
    auto select = [&](const NodeSet&, const NodeSet& snk) {
        Selection s{{}, select_sinks(snk)};
        if (s.sinks.empty()) {
            throw GraphError("sink selector returned no nodes");
        }
        return s;
    };
    return rr(g, select);
}

std::string format_set(const NodeSet& s, std::span<const std::string> labels) {
    std::string out = "{";
    bool first = true;
    for (NodeId v : s) {
        if (!first) {
            out += ",";
        }
        first = false;
        out += index_of(v) < labels.size() ? labels[index_of(v)]
                                           : "#" + std::to_string(index_of(v));
    }
    out += "}";
    return out;
}

}  // namespace entlayer
