#pragma once

#include <cstdint>
#include <stdexcept>

#include "entlayer/scm.hpp"

namespace entlayer {

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GeneratorConfig {
    std::size_t nodes = 5;
    double edge_probability = 0.5;
    std::size_t support_min = 2;
    std::size_t support_max = 3;
    // Output alphabet size bounds for injective-noise tables (base and
    // sir_faithful). Raised to the noise support size when smaller.
    std::size_t alphabet_min = 2;
    std::size_t alphabet_max = 4;
    // Noise probabilities are w_i / sum(w) with integer w_i in [1, weight_max].
    std::uint32_t weight_max = 8;
    Profile profile = Profile::base;
    EntropyOrder entropy = EntropyOrder::known;
    std::size_t max_attempts = 2000;
    // Minimum spacing between sorted noise entropies in strict mode.
    double strict_gap = 1e-6;
    std::size_t exhaustive_faithfulness_max_nodes = 6;
};

/// Random SCM whose validators confirm the requested profile. Instances
/// failing a check are regenerated; GenerationError names the constraint
/// that kept failing once max_attempts is exhausted.
Scm generate_scm(const GeneratorConfig& cfg, std::uint64_t seed);

/// Node labels used by the generator: A..Z, then V26, V27, ...
std::string generated_label(std::size_t i);

}  // namespace entlayer
