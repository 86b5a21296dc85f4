#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigfuzz/coverage.hpp"
#include "sigfuzz/mutate.hpp"
#include "sigfuzz/pool.hpp"
#include "sigfuzz/seedgen.hpp"

namespace sigfuzz {

struct CampaignConfig {
  double budget_seconds = 60.0;
  // when nonzero the campaign stops after exactly this many fuzz executions,
  // which makes single-worker runs byte-reproducible (wall budgets are not)
  uint64_t exec_budget = 0;
  int workers = 1;
  uint64_t seed = 1;
  int nwise_n = 2;
  int unroll_bound = kDefaultUnrollBound;
  double seedgen_budget = 5.0;
  bool bmc_seeds = true;
  bool signal_mutations = true;
  MutationConfig mutation;
  double sample_interval = 0.25;  // series sampling, seconds
};

struct SeriesRow {
  double elapsed = 0;  // wall seconds; virtual (executions / 20000) in exec-budget mode
  uint64_t executions = 0;
  double unit_pct = 0, cond_dec_pct = 0, mcdc_pct = 0;
};

struct Finding {
  FaultKind kind;
  int step = 0;
  std::vector<uint8_t> bytes;
};

struct CampaignResult {
  CampaignConfig config;
  CoverageMetrics seed_metrics;   // after the initial pool, before fuzzing
  CoverageMetrics final_metrics;
  std::vector<SeriesRow> series;
  SeedgenReport seedgen;
  uint64_t executions = 0;
  uint64_t accepted = 0;
  uint64_t rejected = 0;
  size_t pool_size = 0;
  std::vector<TestCase> corpus;  // final pool snapshot
  std::vector<Finding> findings;
  CumulativeCoverage coverage;   // final cumulative state

  CampaignResult(const InstrumentedModel& im) : coverage(im) {}
};

// Seed, then loop select -> mutate -> execute -> merge -> pool update until
// the budget runs out. Deterministic for workers=1 with an exec budget.
CampaignResult fuzz_campaign(const InstrumentedModel& im, const CampaignConfig& cfg);

}  // namespace sigfuzz
