#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "entlayer/graph.hpp"

namespace entlayer {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Graph text format:
//   nodes: A,B,C
//   edge: A -> B
std::string format_graph(const Dag& g);
Dag parse_graph(std::string_view text);

// Layering text format, one line per layer in order (1-based):
//   layer 1: A
//   layer 2: B,C
std::string format_layering(const Layering& l, std::span<const std::string> labels);
Layering parse_layering(std::string_view text, const Dag& g);

}  // namespace entlayer
