#pragma once

#include <iosfwd>

namespace tvc {

// Fast oracle suites: gradient finite differences, quantizer brute force,
// straight-through routing, assignment brute force, divergence properties,
// persistence round trips and the closed-form correlation cases. Prints one
// line per suite; returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace tvc
