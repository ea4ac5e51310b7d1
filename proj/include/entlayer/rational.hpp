#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace entlayer {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a decimal ("0.125", "1e-3") into an exact
/// rational. Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("1" for integers).
std::string to_fraction_string(const Rational& r);

/// -p log2 p with 0 log 0 = 0.
double surprisal_term(const Rational& p);

}  // namespace entlayer
