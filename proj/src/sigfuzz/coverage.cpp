#include "sigfuzz/coverage.hpp"

#include <algorithm>

namespace sigfuzz {

namespace {

constexpr size_t kHistoryCap = 4096;

inline uint64_t mix64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdull;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ull;
  x ^= x >> 33;
  return x;
}

}  // namespace

CumulativeCoverage::CumulativeCoverage(const InstrumentedModel& im) : im_(&im) {
  dec_outcomes_.assign(im.decisions.size(), 0);
  cond_outcomes_.assign(im.total_cond_keys, 0);
  mcdc_sat_.assign(im.total_cond_keys, 0);
  units_.assign(im.unit_count, 0);
  history_.resize(im.decisions.size());
}

std::vector<std::pair<int, int>> CumulativeCoverage::mcdc_update(
    const std::vector<std::vector<DecisionEval>>& evaluations, CoverageDelta* delta) {
  std::vector<std::pair<int, int>> newly;
  for (size_t d = 0; d < evaluations.size() && d < history_.size(); ++d) {
    const auto& info = im_->decisions[d];
    auto& hist = history_[d];
    for (const auto& ev : evaluations[d]) {
      CoverageVector w{ev.word};
      bool known = false;
      for (uint64_t h : hist)
        if (h == w.word) {
          known = true;
          break;
        }
      if (known) continue;
      for (uint64_t h : hist) {
        CoverageVector v{h};
        if (!dec_flipped(w, v)) continue;
        if (info.single()) {
          int flat = im_->cond_flat_index(static_cast<int>(d), 0);
          if (!mcdc_sat_[flat]) {
            mcdc_sat_[flat] = 1;
            newly.emplace_back(static_cast<int>(d), 0);
          }
          continue;
        }
        for (int c = 1; c <= info.condition_count; ++c) {
          if (cond_flipped(w, v, c)) {
            int flat = im_->cond_flat_index(static_cast<int>(d), c);
            if (!mcdc_sat_[flat]) {
              mcdc_sat_[flat] = 1;
              newly.emplace_back(static_cast<int>(d), c);
            }
            break;  // the equality pins exactly one index
          }
        }
      }
      if (hist.size() < kHistoryCap) hist.push_back(w.word);
    }
  }
  if (delta)
    delta->new_mcdc.insert(delta->new_mcdc.end(), newly.begin(), newly.end());
  return newly;
}

CoverageDelta CumulativeCoverage::merge_trace(const ExecutionTrace& trace) {
  CoverageDelta delta;
  for (size_t b = 0; b < trace.unit_hits.size() && b < units_.size(); ++b) {
    if (trace.unit_hits[b] && !units_[b]) {
      units_[b] = 1;
      delta.new_units.push_back(static_cast<int>(b));
    }
  }
  for (size_t d = 0; d < trace.evaluations.size(); ++d) {
    const auto& info = im_->decisions[d];
    for (const auto& ev : trace.evaluations[d]) {
      bool dec = ev.word & 1;
      uint8_t bit = dec ? 2 : 1;
      if (!(dec_outcomes_[d] & bit)) {
        dec_outcomes_[d] |= bit;
        delta.new_decision_outcomes.emplace_back(static_cast<int>(d), dec);
      }
      if (info.single()) {
        int flat = im_->cond_flat_index(static_cast<int>(d), 0);
        if (!(cond_outcomes_[flat] & bit)) {
          cond_outcomes_[flat] |= bit;
          delta.new_condition_outcomes.emplace_back(static_cast<int>(d), 0, dec);
        }
      } else {
        for (int c = 1; c <= info.condition_count; ++c) {
          if (!(ev.mask >> c & 1)) continue;  // short-circuited, never evaluated
          bool outcome = ev.word >> c & 1;
          uint8_t cbit = outcome ? 2 : 1;
          int flat = im_->cond_flat_index(static_cast<int>(d), c);
          if (!(cond_outcomes_[flat] & cbit)) {
            cond_outcomes_[flat] |= cbit;
            delta.new_condition_outcomes.emplace_back(static_cast<int>(d), c, outcome);
          }
        }
      }
    }
  }
  mcdc_update(trace.evaluations, &delta);
  return delta;
}

CoverageMetrics CumulativeCoverage::metrics() const {
  CoverageMetrics m;
  m.units_total = static_cast<int>(units_.size());
  for (uint8_t u : units_) m.units_covered += u ? 1 : 0;

  for (size_t d = 0; d < dec_outcomes_.size(); ++d) {
    const auto& info = im_->decisions[d];
    m.outcomes_total += 2;
    m.outcomes_covered += (dec_outcomes_[d] & 1) + ((dec_outcomes_[d] >> 1) & 1);
    if (!info.single()) {
      for (int c = 1; c <= info.condition_count; ++c) {
        uint8_t cb = cond_outcomes_[im_->cond_flat_index(static_cast<int>(d), c)];
        m.outcomes_total += 2;
        m.outcomes_covered += (cb & 1) + ((cb >> 1) & 1);
      }
    }
  }
  m.mcdc_total = im_->total_cond_keys;
  for (uint8_t s : mcdc_sat_) m.mcdc_covered += s ? 1 : 0;

  m.unit_pct = m.units_total ? 100.0 * m.units_covered / m.units_total : 100.0;
  m.cond_dec_pct = m.outcomes_total ? 100.0 * m.outcomes_covered / m.outcomes_total : 100.0;
  m.mcdc_pct = m.mcdc_total ? 100.0 * m.mcdc_covered / m.mcdc_total : 100.0;
  return m;
}

std::vector<std::pair<int, int>> CumulativeCoverage::half_flipped_conditions() const {
  std::vector<std::pair<int, int>> out;
  for (size_t d = 0; d < im_->decisions.size(); ++d) {
    const auto& info = im_->decisions[d];
    for (int i = 0; i < info.cond_key_count(); ++i) {
      int key = info.cond_key(i);
      uint8_t mask = cond_outcomes_[im_->cond_flat_index(static_cast<int>(d), key)];
      if (mask == 1 || mask == 2) out.emplace_back(static_cast<int>(d), key);
    }
  }
  return out;
}

std::vector<std::pair<int, int>> trace_condition_keys(const ExecutionTrace& trace,
                                                      const InstrumentedModel& im) {
  std::vector<std::pair<int, int>> keys;
  for (size_t d = 0; d < trace.evaluations.size(); ++d) {
    if (trace.evaluations[d].empty()) continue;
    const auto& info = im.decisions[d];
    if (info.single()) {
      keys.emplace_back(static_cast<int>(d), 0);
      continue;
    }
    uint64_t mask = 0;
    for (const auto& ev : trace.evaluations[d]) mask |= ev.mask;
    for (int c = 1; c <= info.condition_count; ++c)
      if (mask >> c & 1) keys.emplace_back(static_cast<int>(d), c);
  }
  return keys;
}

Signature signature(const ExecutionTrace& trace, const InstrumentedModel& im) {
  std::vector<uint64_t> items;
  for (size_t d = 0; d < trace.evaluations.size(); ++d) {
    const auto& info = im.decisions[d];
    for (const auto& ev : trace.evaluations[d]) {
      bool dec = ev.word & 1;
      items.push_back(static_cast<uint64_t>(d) << 32 | (dec ? 1 : 0));
      if (!info.single()) {
        for (int c = 1; c <= info.condition_count; ++c) {
          if (!(ev.mask >> c & 1)) continue;
          uint64_t outcome = ev.word >> c & 1;
          items.push_back(static_cast<uint64_t>(d) << 32 | static_cast<uint64_t>(c) << 8 |
                          outcome);
        }
      }
    }
  }
  for (size_t b = 0; b < trace.unit_hits.size(); ++b)
    if (trace.unit_hits[b]) items.push_back(1ull << 63 | b);

  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());

  Signature sig{0x9ae16a3b2f90404full, 0xc3a5c85c97cb3127ull};
  for (uint64_t item : items) {
    sig.hi = mix64(sig.hi ^ item);
    sig.lo = mix64(sig.lo + (item * 0x9e3779b97f4a7c15ull | 1));
  }
  return sig;
}

}  // namespace sigfuzz
