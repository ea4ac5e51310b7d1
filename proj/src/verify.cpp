#include "entlayer/verify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "entlayer/faithfulness.hpp"
#include "random.hpp"

namespace entlayer {

namespace {

bool subset_of(const NodeSet& a, const NodeSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool intersects(const NodeSet& a, const NodeSet& b) {
    return std::any_of(a.begin(), a.end(), [&](NodeId v) { return b.count(v) != 0; });
}

std::string bits(double h) { return fmt::format("{:.9f}", h); }

}  // namespace

std::string to_string(Clause c) {
    switch (c) {
        case Clause::weak_upper: return "weak_upper";
        case Clause::equal: return "equal";
        case Clause::strict_upper: return "strict_upper";
        case Clause::strict_lower: return "strict_lower";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::skip: return "SKIP";
    }
    return "?";
}

ClauseMatch classify_case(const Dag& g, NodeId v, const NodeSet& s) {
    g.require(v);
    g.require_all(s);
    if (s.count(v) != 0) {
        throw GraphError("classify_case: v must not be in the conditioning set");
    }
    ClauseMatch match;
    const NodeSet& par = g.parents_of(v);
    if (subset_of(par, s)) {
        match.clauses.push_back(Clause::weak_upper);
        match.clauses.push_back(intersects(descendants(g, v), s) ? Clause::strict_upper
                                                                 : Clause::equal);
        return match;
    }
    NodeSet blocked = s;
    blocked.insert(par.begin(), par.end());
    for (NodeId p : par) {
        if (s.count(p) == 0 && !intersects(descendants(g, p), blocked)) {
            match.clauses.push_back(Clause::strict_lower);
            match.witness = p;
            break;
        }
    }
    return match;
}

BoundPremises establish_premises(const Scm& m) {
    BoundPremises p;
    p.injective_noise = check_injective_noise(m).holds;
    p.injective_noise_plus_one = check_injective_noise_plus_one(m).holds;
    p.nonconstant_noise = check_nonconstant_noise(m).holds;
    p.directed_faithfulness = check_directed_faithfulness(m).holds;
    return p;
}

std::vector<std::pair<NodeId, NodeSet>> bound_cases(const Dag& g, const BoundsOptions& opt) {
    std::vector<std::pair<NodeId, NodeSet>> out;
    std::vector<NodeId> nodes(g.nodes().begin(), g.nodes().end());
    if (nodes.size() <= opt.exhaustive_max_nodes) {
        for (NodeId v : nodes) {
            std::vector<NodeId> rest;
            for (NodeId u : nodes) {
                if (u != v) rest.push_back(u);
            }
            for (std::size_t bits = 0; bits < (std::size_t{1} << rest.size()); ++bits) {
                NodeSet s;
                for (std::size_t k = 0; k < rest.size(); ++k) {
                    if (bits & (std::size_t{1} << k)) s.insert(rest[k]);
                }
                out.emplace_back(v, std::move(s));
            }
        }
        return out;
    }
    detail::Rng rng(opt.seed);
    for (std::size_t i = 0; i < opt.budget; ++i) {
        NodeId v = nodes[rng.below(nodes.size())];
        NodeSet s;
        for (NodeId u : nodes) {
            if (u != v && rng.chance(0.5)) s.insert(u);
        }
        out.emplace_back(v, std::move(s));
    }
    return out;
}

std::vector<BoundCheckCase> check_entropy_bounds(const Scm& m, const EntropyOracle& oracle,
                                                 const BoundPremises& premises,
                                                 const BoundsOptions& opt) {
    std::vector<BoundCheckCase> out;
    for (const auto& [v, s] : bound_cases(m.graph(), opt)) {
        const ClauseMatch match = classify_case(m.graph(), v, s);
        BoundCheckCase base;
        base.node = v;
        base.conditioning = s;
        base.measured = oracle.cond_entropy({v}, s);
        base.noise_entropy = noise_entropy(m, v);
        if (match.clauses.empty()) {
            out.push_back(base);
            continue;
        }
        const double h = base.measured;
        const double hn = base.noise_entropy;
        for (Clause c : match.clauses) {
            BoundCheckCase rec = base;
            rec.clause = c;
            bool premised = true;
            bool holds = false;
            switch (c) {
                case Clause::weak_upper:
                    holds = h <= hn + opt.margin;
                    break;
                case Clause::equal:
                    premised = premises.injective_noise;
                    holds = std::abs(h - hn) <= opt.margin;
                    break;
                case Clause::strict_upper:
                    premised = premises.directed_faithfulness;
                    holds = h < hn - opt.margin;
                    break;
                case Clause::strict_lower:
                    premised = premises.injective_noise_plus_one && premises.nonconstant_noise;
                    holds = h > hn + opt.margin;
                    break;
            }
            rec.verdict = !premised ? Verdict::skip : holds ? Verdict::pass : Verdict::fail;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

std::vector<BoundCheckCase> check_entropy_bounds(const Scm& m, const EntropyOracle& oracle,
                                                 const BoundsOptions& opt) {
    return check_entropy_bounds(m, oracle, establish_premises(m), opt);
}

std::string format_case(const BoundCheckCase& c, std::span<const std::string> labels) {
    return fmt::format("{} v={} S={} H={} Hnoise={} {}", c.clause ? to_string(*c.clause) : "none",
                       labels[index_of(c.node)], format_set(c.conditioning, labels),
                       bits(c.measured), bits(c.noise_entropy), to_string(c.verdict));
}

std::vector<NoiseIndependenceCase> check_noise_independence(const Scm& m, const EntropyOracle& noise_oracle,
                                     const BoundsOptions& opt) {
    const Dag noise_graph = explicit_noise_graph(m);
    std::vector<NoiseIndependenceCase> out;
    for (const auto& [v, s] : bound_cases(m.graph(), opt)) {
        if (s.empty()) {
            continue;
        }
        NoiseIndependenceCase c;
        c.node = v;
        c.conditioning = s;
        if (intersects(descendants(m.graph(), v), s)) {
            out.push_back(std::move(c));
            continue;
        }
        const NodeSet nv{m.noise_node(v)};
        c.separated = d_separated(noise_graph, nv, s, {});
        c.mutual_information = mutual_information(noise_oracle, nv, s, {});
        c.verdict = c.separated && c.mutual_information <= kIndependenceTolerance ? Verdict::pass
                                                                                 : Verdict::fail;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<NoiseIndependenceCase> check_noise_independence(const Scm& m, const BoundsOptions& opt) {
    TableOracle oracle(joint_distribution(m, true));
    return check_noise_independence(m, oracle, opt);
}

std::string format_case(const NoiseIndependenceCase& c, std::span<const std::string> labels) {
    if (c.verdict == Verdict::skip) {
        return fmt::format("noise_independence v={} S={} SKIP", labels[index_of(c.node)],
                           format_set(c.conditioning, labels));
    }
    return fmt::format("noise_independence v={} S={} dsep={} I={} {}", labels[index_of(c.node)],
                       format_set(c.conditioning, labels), c.separated ? "yes" : "no",
                       bits(c.mutual_information), to_string(c.verdict));
}

namespace {

template <typename Case>
Tally tally_cases(std::span<const Case> cases) {
    Tally t;
    for (const auto& c : cases) {
        switch (c.verdict) {
            case Verdict::pass: ++t.pass; break;
            case Verdict::fail: ++t.fail; break;
            case Verdict::skip: ++t.skip; break;
        }
    }
    return t;
}

}  // namespace

Tally tally(std::span<const BoundCheckCase> cases) { return tally_cases(cases); }
Tally tally(std::span<const NoiseIndependenceCase> cases) { return tally_cases(cases); }

TruthReport check_discovery_against_truth(const Dag& truth, const DiscoveryResult& result) {
    const auto& labels = truth.registry();
    const LayeringReport layering = check_layering(truth, result.layering);
    if (!layering.valid) {
        return {false, std::nullopt, "not a layering of the true graph: " + layering.reason};
    }
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
        const auto& it = result.trace[k];
        const Dag res = residual(truth, it.remaining);
        const NodeSet allowed = result.algorithm == Algorithm::sour ? sources(res) : sinks(res);
        if (!subset_of(it.selected, allowed)) {
            return {false, k + 1,
                    fmt::format("iteration {} selected {} but the residual {} are {}", k + 1,
                                format_set(it.selected, labels),
                                result.algorithm == Algorithm::sour ? "sources" : "sinks",
                                format_set(allowed, labels))};
        }
    }
    return {};
}

TruthReport check_equality_sets(const Dag& truth, const DiscoveryResult& result) {
    const auto& labels = truth.registry();
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
        const auto& it = result.trace[k];
        const Dag res = residual(truth, it.remaining);
        const NodeSet expected = result.algorithm == Algorithm::sour ? sources(res) : sinks(res);
        if (it.qualifying != expected) {
            return {false, k + 1,
                    fmt::format("iteration {} qualifying set {} differs from {}", k + 1,
                                format_set(it.qualifying, labels), format_set(expected, labels))};
        }
    }
    return {};
}

bool check_call_bound(const DiscoveryResult& result, std::size_t n) {
    return result.oracle_calls <= n * (n + 1) / 2;
}

}  // namespace entlayer
