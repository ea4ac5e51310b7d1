#include "entlayer/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "entlayer/discovery.hpp"
#include "entlayer/faithfulness.hpp"
#include "entlayer/generator.hpp"
#include "entlayer/graph_io.hpp"
#include "entlayer/oracle.hpp"
#include "entlayer/scm_io.hpp"
#include "entlayer/verify.hpp"

namespace entlayer {

namespace {

struct Assumptions {
    AssumptionReport injective;
    AssumptionReport plus_one;
    AssumptionReport nonconstant;
    AssumptionReport weak;
    AssumptionReport strict;
    AssumptionReport directed;

    std::vector<const AssumptionReport*> all() const {
        return {&injective, &plus_one, &nonconstant, &weak, &strict, &directed};
    }
};

Assumptions assess(const Scm& m, const EntropyOracle& noise_oracle) {
    return {check_injective_noise(m),
            check_injective_noise_plus_one(m),
            check_nonconstant_noise(m),
            check_noise_entropy_order(m, Monotonicity::weak),
            check_noise_entropy_order(m, Monotonicity::strict),
            check_directed_faithfulness(m, noise_oracle)};
}

// Assumptions an algorithm/mode pair is licensed under that do not hold.
std::vector<std::string> missing_premises(const Assumptions& a, Algorithm algo, bool known) {
    std::vector<std::string> missing;
    for (const auto* r : {&a.injective, &a.nonconstant}) {
        if (!r->holds) missing.push_back(r->id);
    }
    if (algo == Algorithm::sour) {
        if (!a.plus_one.holds) missing.push_back(a.plus_one.id);
        if (!known && !a.weak.holds) missing.push_back(a.weak.id);
    } else if (known) {
        if (!a.directed.holds) missing.push_back(a.directed.id);
    } else if (!a.strict.holds && !(a.directed.holds && a.weak.holds)) {
        missing.push_back(a.directed.holds ? a.weak.id : a.directed.id + " (or strict_entropy_order)");
    }
    return missing;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

DiscoveryMode make_mode(const Scm& m, bool known, double tol) {
    if (!known) {
        return MonotoneEntropy{tol};
    }
    KnownNoiseEntropy mode;
    mode.tol = tol;
    const auto& disclosed = m.metadata().known_noise_entropies;
    const auto computed = noise_entropies(m);
    for (NodeId v : m.graph().nodes()) {
        mode.entropies[v] = disclosed.empty() ? computed[index_of(v)] : disclosed[index_of(v)];
    }
    return mode;
}

void print_assumptions(std::ostream& out, const Assumptions& a) {
    for (const auto* r : a.all()) {
        out << "assumption " << r->id << (r->holds ? " holds" : " fails");
        if (!r->holds && !r->witnesses.empty()) {
            out << ": " << r->witnesses.front();
        }
        out << "\n";
    }
}

std::string machine_discovery(const DiscoveryResult& r, std::span<const std::string> labels) {
    std::ostringstream out;
    out << "algo=" << to_string(r.algorithm) << "\n";
    out << "mode=" << (r.known_entropies ? "known" : "monotone") << "\n";
    out << "guaranteed=" << (r.guaranteed ? "true" : "false") << "\n";
    out << "layers=" << r.layering.size() << "\n";
    for (std::size_t i = 0; i < r.layering.size(); ++i) {
        std::vector<std::string> names;
        for (NodeId v : r.layering.layers[i]) names.push_back(labels[index_of(v)]);
        out << "layer." << i + 1 << "=" << join(names, ",") << "\n";
    }
    out << "oracle_calls=" << r.oracle_calls << "\n";
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
        for (const auto& [v, h] : r.trace[k].entropies) {
            out << "iter." << k + 1 << ".H." << labels[index_of(v)] << "=" << fmt::format("{:.12f}", h)
                << "\n";
        }
        std::vector<std::string> names;
        for (NodeId v : r.trace[k].selected) names.push_back(labels[index_of(v)]);
        out << "iter." << k + 1 << ".selected=" << join(names, ",") << "\n";
    }
    return out.str();
}

struct GenArgs {
    GeneratorConfig cfg;
    std::string profile = "base";
    std::string entropy = "known";
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
    GeneratorConfig cfg = a.cfg;
    try {
        cfg.profile = parse_profile(a.profile);
        cfg.entropy = parse_entropy_order(a.entropy);
    } catch (const ScmError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::optional<Scm> m;
    try {
        m.emplace(generate_scm(cfg, a.seed));
    } catch (const GenerationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitAssumption;
    }
    const std::string text = format_scm(*m);
    if (a.output.empty()) {
        out << text;
        return kExitOk;
    }
    TableOracle noise_oracle(joint_distribution(*m, true));
    std::ostringstream sidecar;
    print_assumptions(sidecar, assess(*m, noise_oracle));
    sidecar << "assumption faithfulness checked " << to_string(m->metadata().faithfulness) << "\n";
    write_file(a.output, text);
    write_file(a.output + ".assumptions", sidecar.str());
    out << "wrote " << a.output << "\n";
    return kExitOk;
}

struct DiscoverArgs {
    std::string scm;
    std::string algo;
    std::string mode;
    std::optional<double> tol;
    bool one_at_a_time = false;
    bool unsafe = false;
    bool machine = false;
    std::string data;
    std::uint64_t max_tuples = 0;
};

int cmd_discover(const DiscoverArgs& a, std::ostream& out, std::ostream& err) {
    Algorithm algo;
    try {
        algo = parse_algorithm(a.algo);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (a.mode != "known" && a.mode != "monotone") {
        err << "error: --mode must be known or monotone\n";
        return kExitUsage;
    }
    const bool known = a.mode == "known";
    if (!a.data.empty() && !a.tol) {
        err << "error: --data requires an explicit --tol\n";
        return kExitUsage;
    }
    const double tol = a.tol.value_or(kDiscoveryTolerance);
    if (!(tol > 0.0)) {
        err << "error: --tol must be positive\n";
        return kExitUsage;
    }

    const Scm m = load_scm(a.scm);
    const std::uint64_t budget = a.max_tuples ? a.max_tuples : default_enumeration_budget();
    TableOracle noise_oracle(joint_distribution(m, true, budget));
    const Assumptions assumptions = assess(m, noise_oracle);
    const auto missing = missing_premises(assumptions, algo, known);
    if (!missing.empty() && !a.unsafe) {
        err << "refusing " << to_string(algo) << " in " << a.mode
            << " mode: required assumptions fail: " << join(missing, ", ") << "\n";
        for (const auto* r : assumptions.all()) {
            const bool relevant = std::any_of(missing.begin(), missing.end(), [&](const std::string& id) {
                return id.rfind(r->id, 0) == 0;
            });
            if (relevant && !r->holds && !r->witnesses.empty()) {
                err << "  " << r->id << ": " << r->witnesses.front() << "\n";
            }
        }
        err << "pass --unsafe to run without a correctness guarantee\n";
        return kExitAssumption;
    }

    std::optional<TableOracle> empirical;
    if (!a.data.empty()) {
        Dataset d = parse_dataset(read_file(a.data));
        if (d.labels != m.graph().registry()) {
            err << "error: dataset columns must match the SCM node labels in order\n";
            return kExitUsage;
        }
        empirical.emplace(empirical_joint(d));
    }
    const EntropyOracle& oracle = empirical ? static_cast<const EntropyOracle&>(*empirical)
                                            : static_cast<const EntropyOracle&>(noise_oracle);

    DiscoveryOptions options;
    options.one_at_a_time = a.one_at_a_time;
    options.guaranteed = missing.empty() && !empirical;
    try {
        DiscoveryResult r = discover(algo, m.graph().nodes(), oracle, make_mode(m, known, tol), options);
        out << (a.machine ? machine_discovery(r, m.graph().registry())
                          : format_discovery(r, m.graph().registry()));
        return kExitOk;
    } catch (const AssumptionViolation& e) {
        err << "assumption violation: " << e.what() << "\n";
        out << (a.machine ? machine_discovery(e.partial(), m.graph().registry())
                          : format_discovery(e.partial(), m.graph().registry()));
        return kExitAssumption;
    }
}

struct CheckArgs {
    std::string scm;
    std::size_t budget = 2000;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    bool machine = false;
    bool verbose = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out) {
    const Scm m = load_scm(a.scm);
    const auto& labels = m.graph().registry();
    TableOracle oracle(joint_distribution(m, true));
    const Assumptions assumptions = assess(m, oracle);
    if (!a.machine) {
        print_assumptions(out, assumptions);
    }

    BoundsOptions opt;
    opt.budget = a.budget;
    opt.seed = a.seed;
    Tally total;
    auto emit = [&](const std::string& line, Verdict v) {
        switch (v) {
            case Verdict::pass: ++total.pass; break;
            case Verdict::fail: ++total.fail; break;
            case Verdict::skip: ++total.skip; break;
        }
        if (a.verbose || v == Verdict::fail || !a.machine) {
            out << line << "\n";
        }
    };

    for (const auto& c : check_noise_independence(m, oracle, opt)) {
        emit(format_case(c, labels), c.verdict);
    }
    BoundPremises premises;
    premises.injective_noise = assumptions.injective.holds;
    premises.injective_noise_plus_one = assumptions.plus_one.holds;
    premises.nonconstant_noise = assumptions.nonconstant.holds;
    premises.directed_faithfulness = assumptions.directed.holds;
    const auto bounds = check_entropy_bounds(m, oracle, premises, opt);
    for (const auto& c : bounds) {
        emit(format_case(c, labels), c.verdict);
    }

    for (Algorithm algo : {Algorithm::sour, Algorithm::sir}) {
        for (bool known : {true, false}) {
            const std::string name =
                fmt::format("discovery {} {}", to_string(algo), known ? "known" : "monotone");
            const auto missing = missing_premises(assumptions, algo, known);
            if (!missing.empty()) {
                emit(name + " SKIP (unlicensed: " + join(missing, ", ") + ")", Verdict::skip);
                continue;
            }
            try {
                const DiscoveryResult r =
                    discover(algo, m.graph().nodes(), oracle, make_mode(m, known, kDiscoveryTolerance));
                TruthReport truth = check_discovery_against_truth(m.graph(), r);
                if (truth.ok && known) {
                    truth = check_equality_sets(m.graph(), r);
                }
                if (truth.ok && !check_call_bound(r, m.size())) {
                    truth = {false, std::nullopt,
                             fmt::format("{} oracle calls exceed the quadratic bound", r.oracle_calls)};
                }
                std::string layers;
                for (const auto& l : r.layering.layers) {
                    layers += (layers.empty() ? "" : " ") + format_set(l, labels);
                }
                emit(fmt::format("{} layering {} calls={} {}", name, layers, r.oracle_calls,
                                 truth.ok ? "PASS" : "FAIL: " + truth.reason),
                     truth.ok ? Verdict::pass : Verdict::fail);
            } catch (const AssumptionViolation& e) {
                emit(name + " FAIL: " + e.what(), Verdict::fail);
            }
        }
    }

    if (a.samples > 0) {
        TableOracle empirical(empirical_joint(sample(m, a.seed, a.samples)));
        const auto diag = check_entropy_bounds(m, empirical, premises, opt);
        const Tally t = tally(diag);
        if (!a.machine) {
            for (const auto& c : diag) {
                out << "diagnostic " << format_case(c, labels) << "\n";
            }
        }
        out << fmt::format("diagnostic_summary: samples={} pass={} fail={} skip={}\n", a.samples,
                           t.pass, t.fail, t.skip);
    }

    if (a.machine) {
        out << "pass=" << total.pass << "\nfail=" << total.fail << "\nskip=" << total.skip
            << "\nstatus=" << (total.ok() ? "ok" : "fail") << "\n";
    } else {
        out << fmt::format("summary: pass={} fail={} skip={}\n", total.pass, total.fail, total.skip);
    }
    return total.ok() ? kExitOk : kExitSuiteFailure;
}

struct SampleArgs {
    std::string scm;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
    const Scm m = load_scm(a.scm);
    const std::string text = format_dataset(sample(m, a.seed, a.n));
    if (a.output.empty()) {
        out << text;
    } else {
        write_file(a.output, text);
    }
    return kExitOk;
}

int cmd_joint(const std::string& path, bool with_noise, std::ostream& out) {
    const Scm m = load_scm(path);
    out << format_joint(joint_distribution(m, with_noise));
    return kExitOk;
}

int cmd_layer(const std::string& path, const std::string& method, std::ostream& out,
              std::ostream& err) {
    const Dag g = parse_graph(read_file(path));
    Layering l;
    if (method == "sour") {
        l = sour_graph(g, take_all());
    } else if (method == "sir") {
        l = sir_graph(g, take_all());
    } else if (method == "rr") {
        l = rr(g, combine(take_all(), take_all()));
    } else {
        err << "error: --method must be sour, sir or rr\n";
        return kExitUsage;
    }
    out << format_layering(l, g.registry());
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal layering discovery with a conditional-entropy oracle"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random SCM satisfying a profile");
    gen_cmd->add_option("--nodes", gen.cfg.nodes, "Number of variables")->capture_default_str();
    gen_cmd->add_option("--edge-prob", gen.cfg.edge_probability, "Edge probability")
        ->capture_default_str();
    gen_cmd->add_option("--profile", gen.profile, "base | plus_one | sir_faithful")
        ->capture_default_str();
    gen_cmd->add_option("--entropy", gen.entropy, "known | weak | strict")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--support-min", gen.cfg.support_min)->capture_default_str();
    gen_cmd->add_option("--support-max", gen.cfg.support_max)->capture_default_str();
    gen_cmd->add_option("--alphabet-min", gen.cfg.alphabet_min)->capture_default_str();
    gen_cmd->add_option("--alphabet-max", gen.cfg.alphabet_max)->capture_default_str();
    gen_cmd->add_option("--max-attempts", gen.cfg.max_attempts)->capture_default_str();
    gen_cmd->add_option("-o,--output", gen.output, "Output file (stdout if omitted)");

    DiscoverArgs disc;
    auto* disc_cmd = app.add_subcommand("discover", "Recover a layering through the entropy oracle");
    disc_cmd->add_option("scm", disc.scm, "SCM file")->required();
    disc_cmd->add_option("--algo", disc.algo, "sour | sir")->required();
    disc_cmd->add_option("--mode", disc.mode, "known | monotone")->required();
    disc_cmd->add_option("--tol", disc.tol, "Selection tolerance in bits (default 1e-9)");
    disc_cmd->add_flag("--one-at-a-time", disc.one_at_a_time, "Remove one node per iteration");
    disc_cmd->add_flag("--unsafe", disc.unsafe, "Run even when required assumptions fail");
    disc_cmd->add_flag("--machine", disc.machine, "key=value output");
    disc_cmd->add_option("--data", disc.data, "Dataset CSV for the plug-in oracle");
    disc_cmd->add_option("--max-tuples", disc.max_tuples,
                         "Noise enumeration budget (default ENTLAYER_BUDGET or 2^24)");

    CheckArgs chk;
    auto* chk_cmd = app.add_subcommand("check", "Check assumptions, entropy bounds and discovery against an SCM");
    chk_cmd->add_option("scm", chk.scm, "SCM file")->required();
    chk_cmd->add_option("--budget", chk.budget, "Random cases for graphs over five nodes")
        ->capture_default_str();
    chk_cmd->add_option("--seed", chk.seed)->capture_default_str();
    chk_cmd->add_option("--samples", chk.samples, "Also run non-asserting empirical diagnostics");
    chk_cmd->add_flag("--machine", chk.machine, "key=value summary, failing cases only");
    chk_cmd->add_flag("--verbose", chk.verbose, "With --machine, print every case");

    SampleArgs smp;
    auto* smp_cmd = app.add_subcommand("sample", "Draw i.i.d. rows from an SCM");
    smp_cmd->add_option("scm", smp.scm, "SCM file")->required();
    smp_cmd->add_option("-n,--rows", smp.n)->capture_default_str();
    smp_cmd->add_option("--seed", smp.seed)->capture_default_str();
    smp_cmd->add_option("-o,--output", smp.output, "Output CSV (stdout if omitted)");

    std::string joint_path;
    bool joint_noise = false;
    auto* joint_cmd = app.add_subcommand("joint", "Print the exact joint distribution");
    joint_cmd->add_option("scm", joint_path, "SCM file")->required();
    joint_cmd->add_flag("--noise", joint_noise, "Include noise variables");

    std::string layer_path;
    std::string layer_method = "sour";
    auto* layer_cmd = app.add_subcommand("layer", "Layer a known graph (text format)");
    layer_cmd->add_option("graph", layer_path, "Graph file")->required();
    layer_cmd->add_option("--method", layer_method, "sour | sir | rr")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen, out, err);
        if (*disc_cmd) return cmd_discover(disc, out, err);
        if (*chk_cmd) return cmd_check(chk, out);
        if (*smp_cmd) return cmd_sample(smp, out);
        if (*joint_cmd) return cmd_joint(joint_path, joint_noise, out);
        if (*layer_cmd) return cmd_layer(layer_path, layer_method, out, err);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace entlayer
