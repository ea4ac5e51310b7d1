#include "entlayer/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <fmt/format.h>

namespace entlayer {

namespace {

bool disjoint(const NodeSet& a, const NodeSet& b) {
    return std::none_of(a.begin(), a.end(), [&](NodeId v) { return b.count(v) != 0; });
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

}  // namespace

JointTable::JointTable(std::vector<NodeId> variables, std::vector<std::string> labels,
                       std::map<Assignment, Rational> entries)
    : variables_(std::move(variables)), labels_(std::move(labels)), entries_(std::move(entries)) {
    if (labels_.size() != variables_.size()) {
        throw OracleError("joint table needs one label per variable");
    }
    NodeSet distinct(variables_.begin(), variables_.end());
    if (distinct.size() != variables_.size()) {
        throw OracleError("joint table variables must be distinct");
    }
    Rational sum = 0;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->first.size() != variables_.size()) {
            throw OracleError("joint table assignment has the wrong arity");
        }
        const int sign = sgn(it->second);
        if (sign < 0) {
            throw OracleError("joint table has a negative probability");
        }
        if (sign == 0) {
            it = entries_.erase(it);
            continue;
        }
        sum += it->second;
        ++it;
    }
    exact_ = sum == 1;
    if (!exact_ && abs(sum - 1) > Rational(1, 1000000000000L)) {
        throw OracleError("joint table mass sums to " + to_fraction_string(sum));
    }
}

Rational JointTable::total() const {
    Rational sum = 0;
    for (const auto& [_, p] : entries_) {
        sum += p;
    }
    return sum;
}

std::optional<std::size_t> JointTable::position(NodeId v) const {
    auto it = std::find(variables_.begin(), variables_.end(), v);
    if (it == variables_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - variables_.begin());
}

std::map<JointTable::Assignment, Rational> JointTable::project(
    const std::vector<std::size_t>& positions) const {
    std::map<Assignment, Rational> out;
    Assignment key(positions.size());
    for (const auto& [a, p] : entries_) {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            key[i] = a[positions[i]];
        }
        auto [it, fresh] = out.try_emplace(key, p);
        if (!fresh) {
            it->second += p;
        }
    }
    return out;
}

JointTable JointTable::marginal(const NodeSet& keep) const {
    std::vector<std::size_t> positions;
    std::vector<NodeId> vars;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (keep.count(variables_[i]) != 0) {
            positions.push_back(i);
            vars.push_back(variables_[i]);
            labels.push_back(labels_[i]);
        }
    }
    if (positions.size() != keep.size()) {
        throw OracleError("marginal requested over a variable the table does not cover");
    }
    return JointTable(std::move(vars), std::move(labels), project(positions));
}

double JointTable::entropy() const {
    double h = 0.0;
    for (const auto& [_, p] : entries_) {
        h += surprisal_term(p);
    }
    return h;
}

std::uint64_t default_enumeration_budget() {
    if (const char* env = std::getenv("ENTLAYER_BUDGET")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            // fall through to the default
        }
    }
    return std::uint64_t{1} << 24;
}

JointTable joint_distribution(const Scm& m, bool include_noise, std::uint64_t budget) {
    const std::size_t n = m.size();
    double tuples = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        tuples *= static_cast<double>(m.noise(node_id(i)).support.size());
    }
    if (tuples > static_cast<double>(budget)) {
        throw OracleError(fmt::format(
            "noise enumeration needs {:.0f} tuples, over the budget of {}", tuples, budget));
    }

    std::vector<NodeId> vars;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        vars.push_back(node_id(i));
        labels.push_back(m.label(node_id(i)));
    }
    if (include_noise) {
        for (std::size_t i = 0; i < n; ++i) {
            vars.push_back(m.noise_node(node_id(i)));
            labels.push_back("N_" + m.label(node_id(i)));
        }
    }

    // Positive-mass noise values and their probabilities, per node.
    std::vector<std::vector<std::pair<Value, Rational>>> choices(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Pmf& pmf = m.noise(node_id(i));
        for (std::size_t k = 0; k < pmf.support.size(); ++k) {
            if (sgn(pmf.probs[k].value()) > 0) {
                choices[i].emplace_back(pmf.support[k], pmf.probs[k].value());
            }
        }
    }

    std::map<JointTable::Assignment, Rational> entries;
    if (n == 0) {
        entries.emplace(JointTable::Assignment{}, Rational(1));
        return JointTable(std::move(vars), std::move(labels), std::move(entries));
    }

    std::vector<std::size_t> idx(n, 0);
    std::vector<Value> noise(n);
    // prefix[i] = product of the chosen probabilities of nodes 0..i-1
    std::vector<Rational> prefix(n + 1, Rational(1));
    std::size_t dirty = 0;
    while (true) {
        for (std::size_t i = dirty; i < n; ++i) {
            noise[i] = choices[i][idx[i]].first;
            prefix[i + 1] = prefix[i] * choices[i][idx[i]].second;
        }
        JointTable::Assignment a = m.evaluate(noise);
        if (include_noise) {
            a.insert(a.end(), noise.begin(), noise.end());
        }
        auto [it, fresh] = entries.try_emplace(std::move(a), prefix[n]);
        if (!fresh) {
            it->second += prefix[n];
        }

        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < choices[pos].size()) {
                break;
            }
            idx[pos] = 0;
            if (pos == 0) {
                return JointTable(std::move(vars), std::move(labels), std::move(entries));
            }
        }
        dirty = pos;
    }
}

JointTable empirical_joint(const Dataset& d) {
    if (d.rows.empty()) {
        throw OracleError("empirical joint of an empty dataset");
    }
    std::map<JointTable::Assignment, unsigned long> counts;
    for (const auto& row : d.rows) {
        if (row.size() != d.labels.size()) {
            throw OracleError("dataset row has the wrong arity");
        }
        ++counts[row];
    }
    std::vector<NodeId> vars;
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        vars.push_back(node_id(i));
    }
    std::map<JointTable::Assignment, Rational> entries;
    const unsigned long total = d.rows.size();
    for (const auto& [a, c] : counts) {
        Rational p(c, total);
        p.canonicalize();
        entries.emplace(a, p);
    }
    return JointTable(std::move(vars), d.labels, std::move(entries));
}

std::string format_joint(const JointTable& t) {
    std::ostringstream out;
    for (const auto& [a, p] : t.entries()) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            out << (i ? "," : "") << t.labels()[i] << "=" << a[i];
        }
        out << " : ";
        if (t.exact()) {
            out << to_fraction_string(p);
        } else {
            out << fmt::format("{:.17g}", p.get_d());
        }
        out << "\n";
    }
    return out.str();
}

TableOracle::TableOracle(JointTable table) : table_(std::move(table)) {
    if (table_.variables().size() > 64) {
        throw OracleError("table oracle supports at most 64 variables");
    }
}

std::uint64_t TableOracle::mask_of(const NodeSet& vars) const {
    std::uint64_t mask = 0;
    for (NodeId v : vars) {
        auto pos = table_.position(v);
        if (!pos) {
            throw OracleError("oracle does not cover node id " + std::to_string(index_of(v)));
        }
        mask |= std::uint64_t{1} << *pos;
    }
    return mask;
}

double TableOracle::entropy_of_mask(std::uint64_t mask) const {
    if (mask == 0) {
        return 0.0;
    }
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(mask); it != cache_.end()) {
            return it->second;
        }
    }
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < table_.variables().size(); ++i) {
        if (mask & (std::uint64_t{1} << i)) {
            positions.push_back(i);
        }
    }
    double h = 0.0;
    for (const auto& [_, p] : table_.project(positions)) {
        h += surprisal_term(p);
    }
    std::lock_guard lock(cache_mutex_);
    return cache_.emplace(mask, h).first->second;
}

double TableOracle::joint_entropy(const NodeSet& vars) const {
    return entropy_of_mask(mask_of(vars));
}

double TableOracle::cond_entropy(const NodeSet& x, const NodeSet& s) const {
    if (x.empty()) {
        throw OracleError("cond_entropy: X must be non-empty");
    }
    if (!disjoint(x, s)) {
        throw OracleError("cond_entropy: X and S must be disjoint");
    }
    const std::uint64_t xm = mask_of(x);
    const std::uint64_t sm = mask_of(s);
    const double h = entropy_of_mask(xm | sm) - entropy_of_mask(sm);
    return h < 0.0 ? 0.0 : h;
}

double mutual_information(const EntropyOracle& o, const NodeSet& x, const NodeSet& y,
                          const NodeSet& s) {
    if (x.empty() || y.empty()) {
        throw OracleError("mutual_information: X and Y must be non-empty");
    }
    if (!disjoint(x, y) || !disjoint(x, s) || !disjoint(y, s)) {
        throw OracleError("mutual_information: X, Y and S must be pairwise disjoint");
    }
    return o.cond_entropy(x, s) - o.cond_entropy(x, set_union(y, s));
}

bool is_independent(const EntropyOracle& o, const NodeSet& x, const NodeSet& y, const NodeSet& s,
                    double tol) {
    return mutual_information(o, x, y, s) <= tol;
}

}  // namespace entlayer
