#pragma once

#include <string>
#include <string_view>

#include "dynlab/dgp/expr.hpp"
#include "dynlab/dgp/individual.hpp"

namespace dynlab::dgp {

// Text form: `(add a b)`, `(sub a b)`, `(mul a b)`, variables `z1..zk` and
// `y1..ym` (1-based), constants as shortest round-trip decimals.
// An individual is one tree per line: f_1 .. f_k, then the readout g.

std::string serialize_tree(const ExprTree& tree);
std::string serialize_individual(const Individual& ind);

/// Throws ParseError with the 0-based character offset of the problem.
ExprTree parse_tree(std::string_view text);

/// Blank lines and lines starting with '#' are ignored. At least two trees
/// are required; the readout may reference z only, and z indices must not
/// exceed the number of state trees.
Individual parse_individual(std::string_view text);

} // namespace dynlab::dgp
