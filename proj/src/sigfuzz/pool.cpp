#include "sigfuzz/pool.hpp"

#include <stdexcept>

namespace sigfuzz {

SeedPool::SeedPool(const InstrumentedModel& im) : im_(&im) {
  exec_times_.assign(im.total_cond_keys, 0);
}

bool SeedPool::add(TestCase tc, const ExecutionTrace& trace) {
  if (!tc.meta.signature) throw std::logic_error("pool entries need a signature");
  if (!sigs_.insert(*tc.meta.signature).second) return false;
  PoolEntry e;
  e.test = std::move(tc);
  e.test.meta.select_times = 0;
  e.cond_keys = trace_condition_keys(trace, *im_);
  entries_.push_back(std::move(e));
  return true;
}

void SeedPool::note_executed(const ExecutionTrace& trace) {
  for (auto [d, key] : trace_condition_keys(trace, *im_))
    exec_times_[im_->cond_flat_index(d, key)]++;
}

std::vector<double> SeedPool::selection_weights(const CumulativeCoverage& cov) const {
  std::vector<double> weights;
  weights.reserve(entries_.size());
  for (const auto& e : entries_) {
    double prob = 1.0 / (1.0 + e.test.meta.select_times);
    double prob2 = 0;
    int counter = 0;
    for (auto [d, key] : e.cond_keys) {
      int flat = im_->cond_flat_index(d, key);
      if (!cov.is_half_flipped_flat(flat)) continue;
      prob2 += 1.0 / (1.0 + static_cast<double>(exec_times_[flat]));
      counter++;
    }
    // a case with no half-flipped conditions keeps the pure novelty factor
    double factor = counter > 0 ? prob2 / counter : 1.0;
    weights.push_back(prob * factor);
  }
  return weights;
}

int SeedPool::seed_select(Rng& rng, const CumulativeCoverage& cov) {
  if (entries_.empty()) throw std::logic_error("seed_select on empty pool");
  std::vector<double> w = selection_weights(cov);
  double total = 0;
  for (double x : w) total += x;
  int pick = static_cast<int>(entries_.size()) - 1;
  if (total > 0) {
    double r = rng.unit() * total;
    double acc = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (r < acc) {
        pick = static_cast<int>(i);
        break;
      }
    }
  } else {
    pick = static_cast<int>(rng.below(entries_.size()));
  }
  entries_[pick].test.meta.select_times++;
  return pick;
}

bool pool_update(SeedPool& pool, TestCase child, const ExecutionTrace& trace,
                 const CoverageDelta& delta, const Signature& sig) {
  pool.note_executed(trace);
  bool interesting = !delta.empty() || !pool.contains(sig);
  if (!interesting) return false;
  child.meta.signature = sig;
  return pool.add(std::move(child), trace);
}

}  // namespace sigfuzz
