#pragma once

#include <cstdint>
#include <vector>

#include "sigfuzz/exec.hpp"
#include "sigfuzz/instrument.hpp"
#include "sigfuzz/unroll.hpp"

namespace sigfuzz {

struct SeedgenOptions {
  int unroll_bound = kDefaultUnrollBound;  // effective K = min(bound, sample_count)
  int path_cap = kDefaultPathCap;
  double budget_seconds = 5.0;
  int nwise_n = 2;
  uint64_t seed = 1;
  bool bmc = true;
};

struct TargetReport {
  int decision = 0;
  int cond_key = 0;
  bool outcome = false;
  int first_step = -1;
  TargetStatus status = TargetStatus::Unknown;
  bool search_only = false;
};

struct SeedgenReport {
  std::vector<TargetReport> targets;
  int paths_enumerated = 0;
  bool enumeration_complete = true;
  int solved = 0, unsat = 0, unknown = 0;
  int bmc_seeds = 0, nwise_seeds = 0;
  double seconds = 0;
};

struct SeedgenResult {
  std::vector<TestCase> seeds;  // signatures filled in, pairwise distinct
  SeedgenReport report;
};

// Initial pool: one verified test case per solved unroll target, n-wise
// combinations over constant-port candidates with zeroed signals, and the
// all-zero case. Never empty.
SeedgenResult generate_initial_seeds(const InstrumentedModel& im, const SeedgenOptions& opt);

}  // namespace sigfuzz
