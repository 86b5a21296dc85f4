#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sigfuzz/exec.hpp"
#include "sigfuzz/instrument.hpp"

namespace sigfuzz {

// The bitmap slot: bit 0 holds the decision outcome, bit c the outcome of
// condition c (1-based).
struct CoverageVector {
  uint64_t word = 0;
  bool operator==(const CoverageVector&) const = default;
};

inline bool record(bool res, int cond_index, CoverageVector& vec) {
  vec.word |= static_cast<uint64_t>(res) << cond_index;
  return res;
}

inline bool record(bool res, int cond_index, int dec_index, std::vector<CoverageVector>& bitmap) {
  return record(res, cond_index, bitmap[dec_index]);
}

inline bool dec_flipped(CoverageVector v1, CoverageVector v2) {
  return ((v1.word ^ v2.word) & 0x1) == 1;
}

// True iff condition cond_idx flipped and every other condition held.
inline bool cond_flipped(CoverageVector v1, CoverageVector v2, int cond_idx) {
  return ((v1.word >> 1) ^ (v2.word >> 1)) == (1ull << (cond_idx - 1));
}

struct CoverageDelta {
  std::vector<std::pair<int, bool>> new_decision_outcomes;          // (decision, outcome)
  std::vector<std::tuple<int, int, bool>> new_condition_outcomes;   // (decision, key, outcome)
  std::vector<std::pair<int, int>> new_mcdc;                        // (decision, key)
  std::vector<int> new_units;                                       // block indices

  bool empty() const {
    return new_decision_outcomes.empty() && new_condition_outcomes.empty() &&
           new_mcdc.empty() && new_units.empty();
  }
};

struct CoverageMetrics {
  double unit_pct = 0;
  double cond_dec_pct = 0;
  double mcdc_pct = 0;
  // raw counters behind the percentages
  int units_covered = 0, units_total = 0;
  int outcomes_covered = 0, outcomes_total = 0;
  int mcdc_covered = 0, mcdc_total = 0;
};

// Global coverage state for one instrumented model. Not synchronized;
// campaigns serialize whole-trace merges.
class CumulativeCoverage {
 public:
  explicit CumulativeCoverage(const InstrumentedModel& im);

  // Folds a trace in and reports exactly what was new.
  CoverageDelta merge_trace(const ExecutionTrace& trace);

  // Pairwise MC/DC detection of new vectors against the full per-decision
  // history. Exposed separately for direct use in tests and replay.
  std::vector<std::pair<int, int>> mcdc_update(
      const std::vector<std::vector<DecisionEval>>& evaluations, CoverageDelta* delta = nullptr);

  CoverageMetrics metrics() const;

  // queries -------------------------------------------------------------
  const InstrumentedModel& model() const { return *im_; }
  bool decision_outcome(int d, bool outcome) const {
    return (dec_outcomes_[d] >> (outcome ? 1 : 0)) & 1;
  }
  // 0, 1 or 2 outcomes seen for a condition key
  int condition_outcome_count(int d, int key) const {
    uint8_t m = cond_outcomes_[im_->cond_flat_index(d, key)];
    return (m & 1) + ((m >> 1) & 1);
  }
  bool condition_outcome(int d, int key, bool outcome) const {
    return (cond_outcomes_[im_->cond_flat_index(d, key)] >> (outcome ? 1 : 0)) & 1;
  }
  bool mcdc_satisfied(int d, int key) const { return mcdc_sat_[im_->cond_flat_index(d, key)]; }
  bool unit_hit(int b) const { return units_[b] != 0; }
  const std::vector<uint64_t>& vectors(int d) const { return history_[d]; }

  // conditions with exactly one outcome covered, as flat indices
  std::vector<std::pair<int, int>> half_flipped_conditions() const;
  bool is_half_flipped_flat(int flat) const {
    uint8_t m = cond_outcomes_[flat];
    return m == 1 || m == 2;
  }

 private:
  const InstrumentedModel* im_;
  std::vector<uint8_t> dec_outcomes_;   // bit0 = false seen, bit1 = true seen
  std::vector<uint8_t> cond_outcomes_;  // flat cond keys, same encoding
  std::vector<uint8_t> mcdc_sat_;       // flat cond keys
  std::vector<uint8_t> units_;
  std::vector<std::vector<uint64_t>> history_;  // per decision, dedup'd words
};

// Order-independent fingerprint of the coverage a single trace achieves:
// a stable 128-bit hash over the sorted (decision, condition, outcome)
// triples plus the sorted executed units.
Signature signature(const ExecutionTrace& trace, const InstrumentedModel& im);

// Condition keys evaluated at least once in the trace, deduplicated,
// as (decision, key) pairs. Drives the pool's ExecTimes statistics.
std::vector<std::pair<int, int>> trace_condition_keys(const ExecutionTrace& trace,
                                                      const InstrumentedModel& im);

}  // namespace sigfuzz
