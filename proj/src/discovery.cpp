#include "entlayer/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <fmt/format.h>

#include "entlayer/graph_io.hpp"

namespace entlayer {

namespace {

NodeSet qualifying_set(const std::map<NodeId, double>& entropies, const DiscoveryMode& mode,
                       Algorithm algorithm) {
    NodeSet out;
    if (const auto* known = std::get_if<KnownNoiseEntropy>(&mode)) {
        for (const auto& [v, h] : entropies) {
            auto it = known->entropies.find(v);
            if (it == known->entropies.end()) {
                throw OracleError("known noise entropies do not cover node id " +
                                  std::to_string(index_of(v)));
            }
            if (std::abs(h - it->second) <= known->tol) {
                out.insert(v);
            }
        }
        return out;
    }
    const double tol = std::get<MonotoneEntropy>(mode).tol;
    auto cmp = [](const auto& a, const auto& b) { return a.second < b.second; };
    const double extremum = algorithm == Algorithm::sour
                                ? std::min_element(entropies.begin(), entropies.end(), cmp)->second
                                : std::max_element(entropies.begin(), entropies.end(), cmp)->second;
    for (const auto& [v, h] : entropies) {
        if (std::abs(h - extremum) <= tol) {
            out.insert(v);
        }
    }
    return out;
}

void validate(const NodeSet& nodes, const EntropyOracle& oracle, const DiscoveryMode& mode) {
    for (NodeId v : nodes) {
        if (!oracle.covers(v)) {
            throw OracleError("oracle does not cover node id " + std::to_string(index_of(v)));
        }
    }
    std::visit(
        [&](const auto& m) {
            if (!(m.tol > 0.0)) {
                throw OracleError("discovery tolerance must be positive");
            }
        },
        mode);
    if (const auto* known = std::get_if<KnownNoiseEntropy>(&mode)) {
        for (NodeId v : nodes) {
            if (known->entropies.count(v) == 0) {
                throw OracleError("known noise entropies do not cover node id " +
                                  std::to_string(index_of(v)));
            }
        }
    }
}

}  // namespace

DiscoveryResult discover(Algorithm algorithm, const NodeSet& nodes, const EntropyOracle& oracle,
                         const DiscoveryMode& mode, const DiscoveryOptions& options) {
    validate(nodes, oracle, mode);
    CountingOracle counted(oracle);

    DiscoveryResult result;
    result.algorithm = algorithm;
    result.known_entropies = std::holds_alternative<KnownNoiseEntropy>(mode);
    result.guaranteed = options.guaranteed;

    NodeSet current = nodes;
    NodeSet removed;
    std::deque<NodeSet> layers;
    while (!current.empty()) {
        IterationTrace it;
        it.remaining = current;
        for (NodeId v : current) {
            NodeSet cond;
            if (algorithm == Algorithm::sour) {
                cond = removed;
            } else {
                cond = current;
                cond.erase(v);
            }
            it.entropies.emplace(v, counted.cond_entropy({v}, cond));
        }
        it.qualifying = qualifying_set(it.entropies, mode, algorithm);
        if (it.qualifying.empty()) {
            result.trace.push_back(std::move(it));
            result.oracle_calls = counted.calls();
            for (const auto& l : layers) {
                result.layering.layers.push_back(l);
            }
            throw AssumptionViolation(
                fmt::format("iteration {}: no node matches its known noise entropy",
                            result.trace.size()),
                std::move(result));
        }
        it.selected = options.one_at_a_time ? NodeSet{*it.qualifying.begin()} : it.qualifying;
        for (NodeId v : it.selected) {
            current.erase(v);
            removed.insert(v);
        }
        if (algorithm == Algorithm::sour) {
            layers.push_back(it.selected);
        } else {
            layers.push_front(it.selected);
        }
        result.trace.push_back(std::move(it));
    }
    result.layering.layers.assign(layers.begin(), layers.end());
    result.oracle_calls = counted.calls();
    return result;
}

DiscoveryResult sour_discover(const NodeSet& nodes, const EntropyOracle& oracle,
                              const DiscoveryMode& mode, const DiscoveryOptions& options) {
    return discover(Algorithm::sour, nodes, oracle, mode, options);
}

DiscoveryResult sir_discover(const NodeSet& nodes, const EntropyOracle& oracle,
                             const DiscoveryMode& mode, const DiscoveryOptions& options) {
    return discover(Algorithm::sir, nodes, oracle, mode, options);
}

std::string to_string(Algorithm a) { return a == Algorithm::sour ? "sour" : "sir"; }

Algorithm parse_algorithm(std::string_view s) {
    if (s == "sour") return Algorithm::sour;
    if (s == "sir") return Algorithm::sir;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

std::string format_discovery(const DiscoveryResult& r, std::span<const std::string> labels) {
    std::ostringstream out;
    if (!r.guaranteed) {
        out << "warning: no correctness guarantee\n";
    }
    out << format_layering(r.layering, labels);
    out << "oracle_calls: " << r.oracle_calls << "\n";
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
        const auto& it = r.trace[k];
        out << "iter " << k + 1 << ": candidates {";
        bool first = true;
        for (const auto& [v, h] : it.entropies) {
            out << (first ? "" : ", ") << labels[index_of(v)] << ": " << fmt::format("{:.9f}", h);
            first = false;
        }
        out << "} selected " << format_set(it.selected, labels) << "\n";
    }
    return out.str();
}

}  // namespace entlayer
