#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "entlayer/graph_io.hpp"
#include "entlayer/scm.hpp"

namespace entlayer {

// SCM file (JSON):
//   nodes:     [{label, alphabet: [ints]}]
//   edges:     [[from, to]]
//   noise:     {label: {support: [ints], probs: ["p/q" | decimal]}}
//   functions: {label: {parent_order: [labels], table: [{parents, noise, out}]}}
//   metadata:  optional {profile, entropy, faithfulness, seed, known_noise_entropies}
// Probability strings are written back exactly as they were read.
std::string format_scm(const Scm& m);
Scm parse_scm(std::string_view text);
Scm load_scm(const std::filesystem::path& path);

// Dataset CSV: header row of labels, then one row of integers per draw.
std::string format_dataset(const Dataset& d);
Dataset parse_dataset(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace entlayer
