#include "entlayer/generator.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "entlayer/faithfulness.hpp"
#include "entlayer/oracle.hpp"
#include "random.hpp"
#include "support_frontier.hpp"

namespace entlayer {

namespace {

constexpr std::size_t kFrontierLimit = std::size_t{1} << 20;

Pmf random_pmf(detail::Rng& rng, const GeneratorConfig& cfg) {
    const std::size_t k = rng.between(cfg.support_min, cfg.support_max);
    std::vector<unsigned long> w(k);
    unsigned long total = 0;
    for (auto& x : w) {
        x = static_cast<unsigned long>(rng.between(1, cfg.weight_max));
        total += x;
    }
    Pmf p;
    for (std::size_t i = 0; i < k; ++i) {
        p.support.push_back(static_cast<Value>(i));
        Rational r(w[i], total);
        r.canonicalize();
        p.probs.emplace_back(r);
    }
    return p;
}

// Noise distributions indexed by node id, arranged so that the requested
// entropy order holds along `order` (a topological order).
std::vector<Pmf> random_noise(detail::Rng& rng, const GeneratorConfig& cfg,
                              const std::vector<NodeId>& order) {
    const std::size_t n = order.size();
    std::vector<Pmf> noise(n);
    if (cfg.entropy == EntropyOrder::known) {
        for (auto& p : noise) {
            p = random_pmf(rng, cfg);
        }
        return noise;
    }
    if (cfg.entropy == EntropyOrder::weak && rng.chance(0.5)) {
        Pmf shared = random_pmf(rng, cfg);
        std::fill(noise.begin(), noise.end(), shared);
        return noise;
    }
    for (int tries = 0; tries < 1000; ++tries) {
        std::vector<std::pair<double, Pmf>> drawn;
        for (std::size_t i = 0; i < n; ++i) {
            Pmf p = random_pmf(rng, cfg);
            double h = entropy_bits(p);
            drawn.emplace_back(h, std::move(p));
        }
        std::stable_sort(drawn.begin(), drawn.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        bool spaced = true;
        if (cfg.entropy == EntropyOrder::strict) {
            for (std::size_t i = 1; i < n; ++i) {
                spaced = spaced && drawn[i].first - drawn[i - 1].first > cfg.strict_gap;
            }
        }
        if (spaced) {
            for (std::size_t i = 0; i < n; ++i) {
                noise[index_of(order[i])] = std::move(drawn[i].second);
            }
            return noise;
        }
    }
    throw GenerationError("could not draw noise entropies spaced by more than the strict gap");
}

struct Draft {
    std::vector<std::vector<Value>> alphabets;
    std::vector<StructuralTable> functions;
};

// Per reachable parent tuple, a random injection of the noise support into
// an alphabet of a values.
void injective_tables(detail::Rng& rng, const GeneratorConfig& cfg, const Dag& g,
                      const std::vector<NodeId>& order, const std::vector<Pmf>& noise, Draft& d) {
    detail::SupportFrontier frontier(g.size(), kFrontierLimit);
    for (NodeId v : order) {
        const Pmf& pmf = noise[index_of(v)];
        const std::size_t s = pmf.support.size();
        const std::size_t lo = std::max(s, cfg.alphabet_min);
        const std::size_t a = rng.between(lo, std::max(lo, cfg.alphabet_max));
        std::vector<NodeId> parents(g.parents_of(v).begin(), g.parents_of(v).end());
        std::vector<TableRow> rows;
        std::map<std::vector<Value>, std::vector<Value>> images;
        for (const auto& tuple : frontier.parent_tuples(parents)) {
            std::vector<Value> pool(a);
            std::iota(pool.begin(), pool.end(), Value{0});
            rng.shuffle(pool);
            pool.resize(s);
            for (std::size_t k = 0; k < s; ++k) {
                rows.push_back({tuple, pmf.support[k], pool[k]});
            }
            images.emplace(tuple, std::move(pool));
        }
        std::vector<Value> alphabet(a);
        std::iota(alphabet.begin(), alphabet.end(), Value{0});
        d.alphabets[index_of(v)] = std::move(alphabet);
        d.functions[index_of(v)] = StructuralTable(parents, rows);
        frontier.assign(v, parents, pmf.positive_support(),
                        [&](const std::vector<Value>& t, Value nv) {
                            const auto& img = images.at(t);
                            auto it = std::find(pmf.support.begin(), pmf.support.end(), nv);
                            return img[static_cast<std::size_t>(it - pmf.support.begin())];
                        });
    }
}

// f_v = sum_p g_p(p) + K * rank(N_v), where each g_p is a random bijection
// of p's alphabet onto 0..|alphabet|-1 and K = 1 + max of the sum. Any one
// parent together with the noise can be recovered from the output once the
// other parents are fixed.
void scaled_sum_tables(detail::Rng& rng, const Dag& g, const std::vector<NodeId>& order,
                       const std::vector<Pmf>& noise, Draft& d) {
    detail::SupportFrontier frontier(g.size(), kFrontierLimit);
    for (NodeId v : order) {
        const Pmf& pmf = noise[index_of(v)];
        std::vector<NodeId> parents(g.parents_of(v).begin(), g.parents_of(v).end());
        std::vector<std::map<Value, Value>> relabel(parents.size());
        Value max_sum = 0;
        for (std::size_t j = 0; j < parents.size(); ++j) {
            const auto& alpha = d.alphabets[index_of(parents[j])];
            std::vector<Value> ranks(alpha.size());
            std::iota(ranks.begin(), ranks.end(), Value{0});
            rng.shuffle(ranks);
            for (std::size_t k = 0; k < alpha.size(); ++k) {
                relabel[j][alpha[k]] = ranks[k];
            }
            max_sum += static_cast<Value>(alpha.size()) - 1;
        }
        const Value scale = max_sum + 1;
        auto f = [&](const std::vector<Value>& tuple, Value nv) {
            Value sum = 0;
            for (std::size_t j = 0; j < tuple.size(); ++j) {
                sum += relabel[j].at(tuple[j]);
            }
            auto it = std::find(pmf.support.begin(), pmf.support.end(), nv);
            return sum + scale * static_cast<Value>(it - pmf.support.begin());
        };
        std::vector<TableRow> rows;
        std::vector<Value> alphabet;
        for (const auto& tuple : frontier.parent_tuples(parents)) {
            for (Value nv : pmf.support) {
                const Value out = f(tuple, nv);
                rows.push_back({tuple, nv, out});
                alphabet.push_back(out);
            }
        }
        std::sort(alphabet.begin(), alphabet.end());
        alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
        d.alphabets[index_of(v)] = std::move(alphabet);
        d.functions[index_of(v)] = StructuralTable(parents, rows);
        frontier.assign(v, parents, pmf.positive_support(), f);
    }
}

}  // namespace

std::string generated_label(std::size_t i) {
    if (i < 26) {
        return std::string(1, static_cast<char>('A' + i));
    }
    return "V" + std::to_string(i);
}

Scm generate_scm(const GeneratorConfig& cfg, std::uint64_t seed) {
    if (cfg.support_min < 2 || cfg.support_max < cfg.support_min) {
        throw GenerationError("noise support bounds must satisfy 2 <= min <= max");
    }
    if (cfg.weight_max < 1) {
        throw GenerationError("weight_max must be at least 1");
    }
    if (cfg.edge_probability < 0.0 || cfg.edge_probability > 1.0) {
        throw GenerationError("edge probability must lie in [0, 1]");
    }
    if (cfg.alphabet_min > cfg.alphabet_max) {
        throw GenerationError("alphabet bounds must satisfy min <= max");
    }
    detail::Rng rng(seed);
    const std::size_t n = cfg.nodes;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(generated_label(i));
    }
    const FaithfulnessScope scope = n <= cfg.exhaustive_faithfulness_max_nodes
                                        ? FaithfulnessScope::exhaustive
                                        : FaithfulnessScope::singleton;

    std::map<std::string, std::size_t> failures;
    for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        // Causal order is a random permutation so labels do not reveal it.
        std::vector<NodeId> perm(n);
        for (std::size_t i = 0; i < n; ++i) {
            perm[i] = node_id(i);
        }
        rng.shuffle(perm);
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng.chance(cfg.edge_probability)) {
                    edges.push_back({perm[i], perm[j]});
                }
            }
        }
        Dag g(labels, edges);
        std::vector<NodeId> order = topological_order(g);

        std::vector<Pmf> noise = random_noise(rng, cfg, order);
        Draft draft{std::vector<std::vector<Value>>(n), std::vector<StructuralTable>(n)};
        if (cfg.profile == Profile::plus_one) {
            scaled_sum_tables(rng, g, order, noise, draft);
        } else {
            injective_tables(rng, cfg, g, order, noise, draft);
        }

        ScmMetadata meta;
        meta.profile = cfg.profile;
        meta.entropy = cfg.entropy;
        meta.faithfulness = scope;
        meta.seed = seed;
        if (cfg.entropy == EntropyOrder::known) {
            for (const auto& p : noise) {
                meta.known_noise_entropies.push_back(entropy_bits(p));
            }
        }
        Scm m(g, std::move(draft.alphabets), std::move(noise), std::move(draft.functions),
              std::move(meta));

        // Re-validate everything the profile promises.
        std::vector<AssumptionReport> reports;
        reports.push_back(check_nonconstant_noise(m));
        reports.push_back(check_injective_noise(m));
        if (cfg.profile == Profile::plus_one) {
            reports.push_back(check_injective_noise_plus_one(m));
        }
        if (cfg.entropy == EntropyOrder::weak) {
            reports.push_back(check_noise_entropy_order(m, Monotonicity::weak));
        } else if (cfg.entropy == EntropyOrder::strict) {
            reports.push_back(check_noise_entropy_order(m, Monotonicity::strict));
        }
        const bool need_noise = cfg.profile == Profile::sir_faithful;
        TableOracle oracle(joint_distribution(m, need_noise));
        reports.push_back(check_faithfulness(m, oracle, scope));
        if (need_noise) {
            reports.push_back(check_directed_faithfulness(m, oracle));
        }
        auto failed = std::find_if(reports.begin(), reports.end(),
                                   [](const AssumptionReport& r) { return !r.holds; });
        if (failed == reports.end()) {
            return m;
        }
        ++failures[failed->id];
    }
    std::string worst = "none";
    std::size_t count = 0;
    for (const auto& [id, c] : failures) {
        if (c > count) {
            worst = id;
            count = c;
        }
    }
    throw GenerationError("no SCM satisfied the profile within " +
                          std::to_string(cfg.max_attempts) + " attempts; most frequent failure: " +
                          worst);
}

}  // namespace entlayer
