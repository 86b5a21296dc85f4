#pragma once

#include <set>
#include <vector>

#include "sigfuzz/coverage.hpp"
#include "sigfuzz/exec.hpp"
#include "sigfuzz/rng.hpp"

namespace sigfuzz {

struct PoolEntry {
  TestCase test;
  std::vector<std::pair<int, int>> cond_keys;  // conditions its trace evaluates
};

// The shared corpus. Signatures are unique across entries; ExecTimes counts,
// per condition, the number of executed traces that evaluated it (accepted
// or not).
class SeedPool {
 public:
  explicit SeedPool(const InstrumentedModel& im);

  // Inserts when the signature is unseen; entry starts with select_times 0.
  bool add(TestCase tc, const ExecutionTrace& trace);
  bool contains(const Signature& sig) const { return sigs_.count(sig) != 0; }

  // Counts one executed trace: +1 for every condition it evaluated.
  void note_executed(const ExecutionTrace& trace);

  // Weighted draw: weight = 1/(1+SelectTimes) * (avg of 1/(1+ExecTimes) over
  // the entry's half-flipped conditions, or 1 when it has none). Increments
  // the chosen entry's select_times. Pool must be non-empty.
  int seed_select(Rng& rng, const CumulativeCoverage& cov);

  // The unnormalized weights seed_select draws from.
  std::vector<double> selection_weights(const CumulativeCoverage& cov) const;

  uint64_t exec_times(int d, int key) const {
    return exec_times_[im_->cond_flat_index(d, key)];
  }
  size_t size() const { return entries_.size(); }
  const PoolEntry& entry(int i) const { return entries_[i]; }
  PoolEntry& entry(int i) { return entries_[i]; }

 private:
  const InstrumentedModel* im_;
  std::vector<PoolEntry> entries_;
  std::set<Signature> sigs_;
  std::vector<uint64_t> exec_times_;  // flat condition keys
};

// Acceptance rule: keep a child iff it adds coverage or carries a never-seen
// signature. ExecTimes statistics update regardless.
bool pool_update(SeedPool& pool, TestCase child, const ExecutionTrace& trace,
                 const CoverageDelta& delta, const Signature& sig);

}  // namespace sigfuzz
