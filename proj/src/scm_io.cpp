#include "entlayer/scm_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace entlayer {

using json = nlohmann::ordered_json;

namespace {

Probability parse_probability(const json& j) {
    if (j.is_string()) {
        return Probability::parse(j.get<std::string>());
    }
    if (j.is_number()) {
        return Probability::parse(j.dump());
    }
    throw ParseError("probability must be a string or a number");
}

std::vector<Value> values_of(const json& j, const char* what) {
    if (!j.is_array()) {
        throw ParseError(std::string(what) + " must be an array of integers");
    }
    std::vector<Value> out;
    for (const auto& x : j) {
        if (!x.is_number_integer()) {
            throw ParseError(std::string(what) + " must contain integers only");
        }
        out.push_back(x.get<Value>());
    }
    return out;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

}  // namespace

std::string format_scm(const Scm& m) {
    const Dag& g = m.graph();
    json root;
    root["nodes"] = json::array();
    for (NodeId v : g.nodes()) {
        root["nodes"].push_back({{"label", g.label(v)}, {"alphabet", m.alphabet(v)}});
    }
    root["edges"] = json::array();
    for (const Edge& e : g.edges()) {
        root["edges"].push_back({g.label(e.from), g.label(e.to)});
    }
    root["noise"] = json::object();
    for (NodeId v : g.nodes()) {
        json probs = json::array();
        for (const auto& p : m.noise(v).probs) {
            probs.push_back(p.text());
        }
        root["noise"][g.label(v)] = {{"support", m.noise(v).support}, {"probs", probs}};
    }
    root["functions"] = json::object();
    for (NodeId v : g.nodes()) {
        const auto& f = m.function(v);
        json order = json::array();
        for (NodeId p : f.parent_order()) {
            order.push_back(g.label(p));
        }
        json table = json::array();
        for (const auto& [key, out] : f.rows()) {
            table.push_back({{"parents", key.first}, {"noise", key.second}, {"out", out}});
        }
        root["functions"][g.label(v)] = {{"parent_order", order}, {"table", table}};
    }
    const auto& meta = m.metadata();
    json mj = json::object();
    if (meta.profile) {
        mj["profile"] = to_string(*meta.profile);
    }
    if (meta.entropy) {
        mj["entropy"] = to_string(*meta.entropy);
    }
    mj["faithfulness"] = to_string(meta.faithfulness);
    if (meta.seed) {
        mj["seed"] = *meta.seed;
    }
    if (!meta.known_noise_entropies.empty()) {
        mj["known_noise_entropies"] = meta.known_noise_entropies;
    }
    root["metadata"] = mj;
    return root.dump(2) + "\n";
}

Scm parse_scm(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("SCM file is not valid JSON: ") + e.what());
    }
    try {
        std::vector<std::string> labels;
        std::vector<std::vector<Value>> alphabets;
        for (const auto& node : field(root, "nodes")) {
            labels.push_back(field(node, "label").get<std::string>());
            alphabets.push_back(values_of(field(node, "alphabet"), "alphabet"));
        }
        std::vector<std::pair<std::string, std::string>> edges;
        for (const auto& e : field(root, "edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw ParseError("each edge must be a [from, to] pair");
            }
            edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
        Dag g = Dag::from_labels(labels, edges);

        const json& noise_j = field(root, "noise");
        const json& func_j = field(root, "functions");
        std::vector<Pmf> noise;
        std::vector<StructuralTable> functions;
        for (const auto& label : labels) {
            if (!noise_j.contains(label)) {
                throw ParseError("no noise distribution for node " + label);
            }
            const json& nj = noise_j.at(label);
            Pmf pmf;
            pmf.support = values_of(field(nj, "support"), "support");
            for (const auto& p : field(nj, "probs")) {
                pmf.probs.push_back(parse_probability(p));
            }
            noise.push_back(std::move(pmf));

            if (!func_j.contains(label)) {
                throw ParseError("no function for node " + label);
            }
            const json& fj = func_j.at(label);
            std::vector<NodeId> order;
            for (const auto& p : field(fj, "parent_order")) {
                order.push_back(g.id_of(p.get<std::string>()));
            }
            std::vector<TableRow> rows;
            for (const auto& r : field(fj, "table")) {
                rows.push_back({values_of(field(r, "parents"), "parents"),
                                field(r, "noise").get<Value>(), field(r, "out").get<Value>()});
            }
            functions.emplace_back(std::move(order), rows);
        }
        for (const auto& [key, _] : noise_j.items()) {
            if (!g.find(key)) {
                throw ParseError("noise given for unknown node " + key);
            }
        }
        for (const auto& [key, _] : func_j.items()) {
            if (!g.find(key)) {
                throw ParseError("function given for unknown node " + key);
            }
        }

        ScmMetadata meta;
        if (root.contains("metadata")) {
            const json& mj = root.at("metadata");
            if (mj.contains("profile")) {
                meta.profile = parse_profile(mj.at("profile").get<std::string>());
            }
            if (mj.contains("entropy")) {
                meta.entropy = parse_entropy_order(mj.at("entropy").get<std::string>());
            }
            if (mj.contains("faithfulness")) {
                meta.faithfulness = parse_faithfulness_scope(mj.at("faithfulness").get<std::string>());
            }
            if (mj.contains("seed")) {
                meta.seed = mj.at("seed").get<std::uint64_t>();
            }
            if (mj.contains("known_noise_entropies")) {
                meta.known_noise_entropies = mj.at("known_noise_entropies").get<std::vector<double>>();
            }
        }
        return Scm(std::move(g), std::move(alphabets), std::move(noise), std::move(functions),
                   std::move(meta));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed SCM file: ") + e.what());
    } catch (const GraphError& e) {
        throw ParseError(std::string("invalid SCM graph: ") + e.what());
    } catch (const ScmError& e) {
        throw ParseError(std::string("invalid SCM: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid SCM: ") + e.what());
    }
}

Scm load_scm(const std::filesystem::path& path) { return parse_scm(read_file(path)); }

std::string format_dataset(const Dataset& d) {
    std::ostringstream out;
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        out << (i ? "," : "") << d.labels[i];
    }
    out << "\n";
    for (const auto& row : d.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << row[i];
        }
        out << "\n";
    }
    return out.str();
}

Dataset parse_dataset(std::string_view text) {
    Dataset d;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (header) {
            d.labels = cells;
            header = false;
            continue;
        }
        if (cells.size() != d.labels.size()) {
            throw ParseError("dataset line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(d.labels.size()));
        }
        std::vector<Value> row;
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                row.push_back(std::stoll(c, &used));
                if (used != c.size()) {
                    throw std::invalid_argument(c);
                }
            } catch (const std::exception&) {
                throw ParseError("dataset line " + std::to_string(line_no) + ": '" + c +
                                 "' is not an integer");
            }
        }
        d.rows.push_back(std::move(row));
    }
    if (header) {
        throw ParseError("dataset has no header line");
    }
    return d;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

}  // namespace entlayer
