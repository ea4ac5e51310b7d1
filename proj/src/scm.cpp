#include "entlayer/scm.hpp"

#include <algorithm>
#include <cmath>

#include "random.hpp"
#include "support_frontier.hpp"

namespace entlayer {

namespace {

constexpr std::size_t kSupportLimit = std::size_t{1} << 22;

std::string describe_tuple(const Scm& m, const std::vector<NodeId>& vars,
                           const std::vector<Value>& values, std::size_t skip = SIZE_MAX) {
    std::string out = "(";
    bool first = true;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i == skip) {
            continue;
        }
        if (!first) {
            out += ",";
        }
        first = false;
        out += m.label(vars[i]) + "=" + std::to_string(values[i]);
    }
    return out + ")";
}

AssumptionReport finish(std::string id, std::vector<std::string> witnesses) {
    AssumptionReport r;
    r.id = std::move(id);
    r.holds = witnesses.empty();
    r.witnesses = std::move(witnesses);
    return r;
}

}  // namespace

Probability::Probability(Rational value) : value_(std::move(value)) {
    value_.canonicalize();
    text_ = to_fraction_string(value_);
}

Probability Probability::parse(std::string_view text) {
    Probability p;
    p.value_ = parse_rational(text);
    p.text_ = std::string(text);
    p.decimal_ = text.find('/') == std::string_view::npos &&
                 text.find_first_of(".eE") != std::string_view::npos;
    return p;
}

Pmf Pmf::uniform(std::size_t k) {
    Pmf p;
    for (std::size_t i = 0; i < k; ++i) {
        p.support.push_back(static_cast<Value>(i));
        p.probs.emplace_back(Rational(1, static_cast<unsigned long>(k)));
    }
    return p;
}

Pmf Pmf::bernoulli(const Rational& p_one) {
    Pmf p;
    p.support = {0, 1};
    p.probs = {Probability(Rational(1 - p_one)), Probability(p_one)};
    return p;
}

void Pmf::validate() const {
    if (support.empty() || support.size() != probs.size()) {
        throw ScmError("noise distribution needs equally many support values and probabilities");
    }
    std::vector<Value> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ScmError("noise support values must be distinct");
    }
    Rational total = 0;
    bool any_decimal = false;
    for (const auto& p : probs) {
        if (sgn(p.value()) < 0) {
            throw ScmError("negative probability " + p.text());
        }
        total += p.value();
        any_decimal = any_decimal || p.is_decimal();
    }
    if (total == 1) {
        return;
    }
    Rational gap = abs(total - 1);
    if (!any_decimal || gap > Rational(1, 1000000000000L)) {
        throw ScmError("noise probabilities sum to " + to_fraction_string(total) + ", not 1");
    }
}

bool Pmf::exact() const {
    Rational total = 0;
    for (const auto& p : probs) {
        total += p.value();
    }
    return total == 1;
}

std::size_t Pmf::effective_support() const {
    return static_cast<std::size_t>(std::count_if(
        probs.begin(), probs.end(), [](const Probability& p) { return sgn(p.value()) > 0; }));
}

std::vector<Value> Pmf::positive_support() const {
    std::vector<Value> out;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (sgn(probs[i].value()) > 0) {
            out.push_back(support[i]);
        }
    }
    return out;
}

double entropy_bits(const Pmf& pmf) {
    double h = 0.0;
    for (const auto& p : pmf.probs) {
        h += surprisal_term(p.value());
    }
    return h;
}

StructuralTable::StructuralTable(std::vector<NodeId> parent_order,
                                 const std::vector<TableRow>& rows)
    : parent_order_(std::move(parent_order)) {
    for (const auto& row : rows) {
        if (row.parents.size() != parent_order_.size()) {
            throw ScmError("table row has " + std::to_string(row.parents.size()) +
                           " parent values, expected " + std::to_string(parent_order_.size()));
        }
        if (!rows_.emplace(Key{row.parents, row.noise}, row.out).second) {
            throw ScmError("duplicate table row");
        }
    }
}

std::optional<Value> StructuralTable::lookup(const std::vector<Value>& parents, Value noise) const {
    auto it = rows_.find(Key{parents, noise});
    if (it == rows_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Value StructuralTable::at(const std::vector<Value>& parents, Value noise) const {
    if (auto v = lookup(parents, noise)) {
        return *v;
    }
    throw ScmError("structural table has no row for this parent/noise combination");
}

std::string to_string(Profile p) {
    switch (p) {
        case Profile::base: return "base";
        case Profile::plus_one: return "plus_one";
        case Profile::sir_faithful: return "sir_faithful";
    }
    return "?";
}

std::string to_string(EntropyOrder e) {
    switch (e) {
        case EntropyOrder::known: return "known";
        case EntropyOrder::weak: return "weak";
        case EntropyOrder::strict: return "strict";
    }
    return "?";
}

std::string to_string(FaithfulnessScope f) {
    switch (f) {
        case FaithfulnessScope::unchecked: return "unchecked";
        case FaithfulnessScope::singleton: return "singleton";
        case FaithfulnessScope::exhaustive: return "exhaustive";
    }
    return "?";
}

Profile parse_profile(std::string_view s) {
    if (s == "base") return Profile::base;
    if (s == "plus_one") return Profile::plus_one;
    if (s == "sir_faithful") return Profile::sir_faithful;
    throw ScmError("unknown profile '" + std::string(s) + "'");
}

EntropyOrder parse_entropy_order(std::string_view s) {
    if (s == "known") return EntropyOrder::known;
    if (s == "weak") return EntropyOrder::weak;
    if (s == "strict") return EntropyOrder::strict;
    throw ScmError("unknown entropy order '" + std::string(s) + "'");
}

FaithfulnessScope parse_faithfulness_scope(std::string_view s) {
    if (s == "unchecked") return FaithfulnessScope::unchecked;
    if (s == "singleton") return FaithfulnessScope::singleton;
    if (s == "exhaustive") return FaithfulnessScope::exhaustive;
    throw ScmError("unknown faithfulness scope '" + std::string(s) + "'");
}

Scm::Scm(Dag graph, std::vector<std::vector<Value>> alphabets, std::vector<Pmf> noise,
         std::vector<StructuralTable> functions, ScmMetadata metadata)
    : graph_(std::move(graph)),
      alphabets_(std::move(alphabets)),
      noise_(std::move(noise)),
      functions_(std::move(functions)),
      metadata_(std::move(metadata)) {
    const std::size_t n = graph_.size();
    if (graph_.registry().size() != n) {
        throw ScmError("SCM graph must not be a residual graph");
    }
    if (alphabets_.size() != n || noise_.size() != n || functions_.size() != n) {
        throw ScmError("every node needs an alphabet, a noise distribution and a function");
    }
    if (!metadata_.known_noise_entropies.empty() && metadata_.known_noise_entropies.size() != n) {
        throw ScmError("known noise entropies must cover every node");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = node_id(i);
        const std::string& name = graph_.label(v);
        auto& alpha = alphabets_[i];
        std::sort(alpha.begin(), alpha.end());
        alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
        if (alpha.empty()) {
            throw ScmError("node " + name + " has an empty alphabet");
        }
        try {
            noise_[i].validate();
        } catch (const ScmError& e) {
            throw ScmError("node " + name + ": " + e.what());
        }
        const auto& par = graph_.parents_of(v);
        const auto& order = functions_[i].parent_order();
        if (!std::equal(par.begin(), par.end(), order.begin(), order.end())) {
            throw ScmError("node " + name + ": parent_order must list exactly its parents");
        }
        const auto& support = noise_[i].support;
        for (const auto& [key, out] : functions_[i].rows()) {
            if (!std::binary_search(alpha.begin(), alpha.end(), out)) {
                throw ScmError("node " + name + ": output " + std::to_string(out) +
                               " is outside its alphabet");
            }
            if (std::find(support.begin(), support.end(), key.second) == support.end()) {
                throw ScmError("node " + name + ": table row uses noise value " +
                               std::to_string(key.second) + " outside the noise support");
            }
        }
    }
    order_ = topological_order(graph_);

    detail::SupportFrontier frontier(n, kSupportLimit);
    for (NodeId v : order_) {
        const auto& f = functions_[index_of(v)];
        const auto& support = noise_[index_of(v)].support;
        for (const auto& tuple : frontier.parent_tuples(f.parent_order())) {
            for (std::size_t p = 0; p < tuple.size(); ++p) {
                const auto& pa = alphabets_[index_of(f.parent_order()[p])];
                if (!std::binary_search(pa.begin(), pa.end(), tuple[p])) {
                    throw ScmError("node " + label(v) + ": reachable parent value outside alphabet");
                }
            }
            for (Value nv : support) {
                if (!f.lookup(tuple, nv)) {
                    throw ScmError("node " + label(v) + ": table has no row for parents " +
                                   describe_tuple(*this, f.parent_order(), tuple) + " noise " +
                                   std::to_string(nv));
                }
            }
        }
        frontier.assign(v, f.parent_order(), noise_[index_of(v)].positive_support(),
                        [&](const std::vector<Value>& t, Value nv) { return f.at(t, nv); });
    }
}

std::vector<Value> Scm::evaluate(std::span<const Value> noise_values) const {
    std::vector<Value> x(size(), 0);
    std::vector<Value> tuple;
    for (NodeId v : order_) {
        const auto& f = functions_[index_of(v)];
        tuple.clear();
        for (NodeId p : f.parent_order()) {
            tuple.push_back(x[index_of(p)]);
        }
        x[index_of(v)] = f.at(tuple, noise_values[index_of(v)]);
    }
    return x;
}

Dag explicit_noise_graph(const Scm& m) {
    const std::size_t n = m.size();
    std::vector<std::string> labels = m.graph().registry();
    std::vector<Edge> edges(m.graph().edges().begin(), m.graph().edges().end());
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("N_" + labels[i]);
        edges.push_back({m.noise_node(node_id(i)), node_id(i)});
    }
    return Dag(std::move(labels), edges);
}

AssumptionReport check_injective_noise(const Scm& m) {
    std::vector<std::string> witnesses;
    for (NodeId v : m.graph().nodes()) {
        const auto& f = m.function(v);
        std::map<std::pair<std::vector<Value>, Value>, Value> seen;
        for (const auto& [key, out] : f.rows()) {
            auto [it, fresh] = seen.emplace(std::pair{key.first, out}, key.second);
            if (!fresh) {
                witnesses.push_back(m.label(v) + ": parents " +
                                    describe_tuple(m, f.parent_order(), key.first) + " noise " +
                                    std::to_string(it->second) + " and " +
                                    std::to_string(key.second) + " both -> " +
                                    std::to_string(out));
                break;
            }
        }
    }
    return finish("injective_noise", std::move(witnesses));
}

AssumptionReport check_injective_noise_plus_one(const Scm& m) {
    std::vector<std::string> witnesses;
    for (NodeId v : m.graph().nodes()) {
        const auto& f = m.function(v);
        const auto& order = f.parent_order();
        bool found = false;
        for (std::size_t j = 0; j < order.size() && !found; ++j) {
            // (other parents, out) -> (value of parent j, noise)
            std::map<std::pair<std::vector<Value>, Value>, std::pair<Value, Value>> seen;
            for (const auto& [key, out] : f.rows()) {
                std::vector<Value> others = key.first;
                others.erase(others.begin() + static_cast<std::ptrdiff_t>(j));
                auto [it, fresh] =
                    seen.emplace(std::pair{std::move(others), out}, std::pair{key.first[j], key.second});
                if (!fresh) {
                    const std::string& pj = m.label(order[j]);
                    witnesses.push_back(
                        m.label(v) + ": (" + pj + "=" + std::to_string(it->second.first) + ",N_" +
                        m.label(v) + "=" + std::to_string(it->second.second) + ") and (" + pj +
                        "=" + std::to_string(key.first[j]) + ",N_" + m.label(v) + "=" +
                        std::to_string(key.second) + ") both -> " + std::to_string(out) +
                        " with other parents " + describe_tuple(m, order, key.first, j));
                    found = true;
                    break;
                }
            }
        }
    }
    return finish("injective_noise_plus_one", std::move(witnesses));
}

AssumptionReport check_nonconstant_noise(const Scm& m) {
    std::vector<std::string> witnesses;
    for (NodeId v : m.graph().nodes()) {
        if (m.noise(v).effective_support() < 2) {
            witnesses.push_back(m.label(v) + ": noise has a single positive-probability value");
        }
    }
    return finish("nonconstant_noise", std::move(witnesses));
}

double noise_entropy(const Scm& m, NodeId v) {
    m.graph().require(v);
    return entropy_bits(m.noise(v));
}

std::vector<double> noise_entropies(const Scm& m) {
    std::vector<double> out;
    out.reserve(m.size());
    for (NodeId v : m.graph().nodes()) {
        out.push_back(entropy_bits(m.noise(v)));
    }
    return out;
}

AssumptionReport check_noise_entropy_order(const Scm& m, Monotonicity mode) {
    const auto h = noise_entropies(m);
    std::vector<std::string> witnesses;
    for (NodeId v : m.graph().nodes()) {
        for (NodeId d : descendants(m.graph(), v)) {
            const double hv = h[index_of(v)];
            const double hd = h[index_of(d)];
            const bool ok = mode == Monotonicity::weak ? hv <= hd + kEntropyOrderTolerance
                                                       : hd - hv > kEntropyOrderTolerance;
            if (!ok) {
                witnesses.push_back("H(N_" + m.label(v) + ")=" + std::to_string(hv) +
                                    (mode == Monotonicity::weak ? " > " : " >= ") + "H(N_" +
                                    m.label(d) + ")=" + std::to_string(hd));
            }
        }
    }
    return finish(mode == Monotonicity::weak ? "weak_entropy_order" : "strict_entropy_order",
                  std::move(witnesses));
}

Dataset sample(const Scm& m, std::uint64_t seed, std::size_t n) {
    if (n == 0) {
        throw ScmError("sample size must be at least 1");
    }
    detail::Rng rng(seed);
    std::vector<std::vector<double>> cdf(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        double acc = 0.0;
        for (const auto& p : m.noise(node_id(i)).probs) {
            acc += p.value().get_d();
            cdf[i].push_back(acc);
        }
    }
    Dataset d;
    d.labels = m.graph().registry();
    d.rows.reserve(n);
    std::vector<Value> noise(m.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double u = rng.unit() * cdf[i].back();
            const auto& pmf = m.noise(node_id(i));
            std::size_t k = 0;
            while (k + 1 < cdf[i].size() && (u >= cdf[i][k] || sgn(pmf.probs[k].value()) == 0)) {
                ++k;
            }
            noise[i] = pmf.support[k];
        }
        d.rows.push_back(m.evaluate(noise));
    }
    return d;
}

}  // namespace entlayer
