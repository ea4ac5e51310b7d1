#include "entlayer/graph_io.hpp"

#include <sstream>
#include <vector>

namespace entlayer {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_labels(std::string_view s) {
    std::vector<std::string> out;
    s = trim(s);
    if (s.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        std::size_t comma = s.find(',', start);
        out.emplace_back(trim(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = trim(text.substr(start, nl - start));
        if (!line.empty()) {
            out.push_back(line);
        }
        if (nl == std::string_view::npos) {
            break;
        }
        start = nl + 1;
    }
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

std::string join(const NodeSet& s, std::span<const std::string> labels) {
    std::string out;
    for (NodeId v : s) {
        if (!out.empty()) {
            out += ",";
        }
        out += labels[index_of(v)];
    }
    return out;
}

}  // namespace

std::string format_graph(const Dag& g) {
    std::ostringstream out;
    out << "nodes: " << join(g.nodes(), g.registry()) << "\n";
    for (const Edge& e : g.edges()) {
        out << "edge: " << g.label(e.from) << " -> " << g.label(e.to) << "\n";
    }
    return out.str();
}

Dag parse_graph(std::string_view text) {
    auto lines = lines_of(text);
    if (lines.empty() || !starts_with(lines.front(), "nodes:")) {
        throw ParseError("graph text must start with a 'nodes:' line");
    }
    std::vector<std::string> labels = split_labels(lines.front().substr(6));
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (!starts_with(line, "edge:")) {
            throw ParseError("line " + std::to_string(i + 1) + ": expected 'edge: <from> -> <to>'");
        }
        std::string_view body = line.substr(5);
        std::size_t arrow = body.find("->");
        if (arrow == std::string_view::npos) {
            throw ParseError("line " + std::to_string(i + 1) + ": missing '->'");
        }
        edges.emplace_back(std::string(trim(body.substr(0, arrow))),
                           std::string(trim(body.substr(arrow + 2))));
    }
    try {
        return Dag::from_labels(std::move(labels), edges);
    } catch (const GraphError& e) {
        throw ParseError(e.what());
    }
}

std::string format_layering(const Layering& l, std::span<const std::string> labels) {
    std::ostringstream out;
    for (std::size_t i = 0; i < l.layers.size(); ++i) {
        out << "layer " << i + 1 << ": " << join(l.layers[i], labels) << "\n";
    }
    return out.str();
}

Layering parse_layering(std::string_view text, const Dag& g) {
    Layering l;
    std::size_t expected = 1;
    for (std::string_view line : lines_of(text)) {
        if (!starts_with(line, "layer ")) {
            throw ParseError("expected 'layer <i>: ...'");
        }
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError("layer line without ':'");
        }
        std::string index(trim(line.substr(6, colon - 6)));
        if (index != std::to_string(expected)) {
            throw ParseError("layer index " + index + " out of sequence");
        }
        ++expected;
        NodeSet layer;
        for (const std::string& label : split_labels(line.substr(colon + 1))) {
            auto v = g.find(label);
            if (!v) {
                throw ParseError("unknown node '" + label + "' in layering");
            }
            layer.insert(*v);
        }
        l.layers.push_back(std::move(layer));
    }
    return l;
}

}  // namespace entlayer
