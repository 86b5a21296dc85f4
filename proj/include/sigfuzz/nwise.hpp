#pragma once

#include <cstdint>
#include <vector>

#include "sigfuzz/ir.hpp"

namespace sigfuzz {

// Suite of combinations over constant ports: one value per port, index order.
struct NWiseSuite {
  std::vector<std::vector<double>> cases;
};

// Dynamic-programming n-wise generation. For every n-subset of ports, every
// cross product of their candidate values appears in at least one case.
// Memoized on (n, port index) with the random representative drawn once per
// key from the seeded generator, so a given seed yields a fixed suite.
//
// Throws std::invalid_argument when n < 1, n > port count, or a port has no
// candidates.
NWiseSuite fast_nwise(int n, const std::vector<std::vector<double>>& port_candidates,
                      uint64_t seed);

}  // namespace sigfuzz
