#include "entlayer/faithfulness.hpp"

#include <fmt/format.h>

namespace entlayer {

namespace {

std::string describe(const Scm& m, const NodeSet& x, const NodeSet& y, const NodeSet& s) {
    const auto& labels = m.graph().registry();
    return format_set(x, labels) + " vs " + format_set(y, labels) + " given " +
           format_set(s, labels);
}

// Records a witness on mismatch; false once eight have been collected.
bool check_triple(const Scm& m, const EntropyOracle& o, const NodeSet& x, const NodeSet& y,
                  const NodeSet& s, std::vector<std::string>& witnesses) {
    const double mi = mutual_information(o, x, y, s);
    const bool independent = mi <= kIndependenceTolerance;
    const bool separated = d_separated(m.graph(), x, y, s);
    if (independent && !separated) {
        witnesses.push_back(fmt::format("independent but d-connected: {} (I={:.3g})",
                                        describe(m, x, y, s), mi));
    } else if (!independent && separated) {
        witnesses.push_back(fmt::format("d-separated but dependent: {} (I={:.3g})",
                                        describe(m, x, y, s), mi));
    }
    return witnesses.size() < 8;
}

}  // namespace

AssumptionReport check_faithfulness(const Scm& m, const EntropyOracle& oracle,
                                    FaithfulnessScope scope) {
    AssumptionReport report;
    report.id = "faithfulness";
    const std::size_t n = m.size();
    std::vector<std::string> witnesses;
    if (scope == FaithfulnessScope::exhaustive) {
        if (n > 12) {
            throw ScmError("exhaustive faithfulness check is limited to 12 nodes");
        }
        // Each node goes to X (1), Y (2), S (3) or nowhere (0).
        std::size_t combos = 1;
        for (std::size_t i = 0; i < n; ++i) {
            combos *= 4;
        }
        std::vector<int> role(n);
        for (std::size_t code = 0; code < combos; ++code) {
            std::size_t c = code;
            NodeSet x, y, s;
            for (std::size_t i = 0; i < n; ++i) {
                role[i] = static_cast<int>(c % 4);
                c /= 4;
                if (role[i] == 1) x.insert(node_id(i));
                if (role[i] == 2) y.insert(node_id(i));
                if (role[i] == 3) s.insert(node_id(i));
            }
            // Symmetric in X and Y: visit each unordered pair once.
            if (x.empty() || y.empty() || *x.begin() > *y.begin()) {
                continue;
            }
            if (!check_triple(m, oracle, x, y, s, witnesses)) {
                break;
            }
        }
    } else if (scope == FaithfulnessScope::singleton) {
        bool more = true;
        for (std::size_t a = 0; a < n && more; ++a) {
            for (std::size_t b = a + 1; b < n && more; ++b) {
                std::vector<NodeId> rest;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i != a && i != b) rest.push_back(node_id(i));
                }
                for (std::size_t bits = 0; bits < (std::size_t{1} << rest.size()) && more; ++bits) {
                    NodeSet s;
                    for (std::size_t k = 0; k < rest.size(); ++k) {
                        if (bits & (std::size_t{1} << k)) s.insert(rest[k]);
                    }
                    more = check_triple(m, oracle, {node_id(a)}, {node_id(b)}, s, witnesses);
                }
            }
        }
    }
    report.holds = witnesses.empty();
    report.witnesses = std::move(witnesses);
    return report;
}

AssumptionReport check_faithfulness(const Scm& m, FaithfulnessScope scope) {
    TableOracle oracle(joint_distribution(m, false));
    return check_faithfulness(m, oracle, scope);
}

AssumptionReport check_directed_faithfulness(const Scm& m, const EntropyOracle& noise_oracle) {
    AssumptionReport report;
    report.id = "directed_faithfulness";
    for (NodeId v : m.graph().nodes()) {
        for (NodeId d : descendants(m.graph(), v)) {
            const double mi = mutual_information(noise_oracle, {m.noise_node(v)}, {d}, {});
            if (mi <= kDependenceThreshold) {
                report.witnesses.push_back(fmt::format("N_{} independent of descendant {} (I={:.3g})",
                                                       m.label(v), m.label(d), mi));
            }
        }
    }
    report.holds = report.witnesses.empty();
    return report;
}

AssumptionReport check_directed_faithfulness(const Scm& m) {
    TableOracle oracle(joint_distribution(m, true));
    return check_directed_faithfulness(m, oracle);
}

}  // namespace entlayer
