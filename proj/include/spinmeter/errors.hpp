#pragma once

#include <stdexcept>

namespace spinmeter {

// Thrown when a computed object fails one of its numerical invariants
// (completeness, positivity, normalization, rank).  Kept distinct from
// std::invalid_argument, which signals malformed caller input, so the two
// map onto different process exit codes in the command-line tool.
struct invariant_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spinmeter
