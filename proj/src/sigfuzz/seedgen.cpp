#include "sigfuzz/seedgen.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "sigfuzz/coverage.hpp"
#include "sigfuzz/nwise.hpp"

namespace sigfuzz {

SeedgenResult generate_initial_seeds(const InstrumentedModel& im, const SeedgenOptions& opt) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  SeedgenResult res;
  Executor executor(im);
  BufferLayout layout = layout_test_buffer(im.base);
  CumulativeCoverage covered(im);
  std::set<Signature> sigs;

  // Solver seeds dedup by signature; n-wise cases are kept regardless, the
  // combinations themselves are the point.
  auto add_seed = [&](TestCase tc, bool dedup) -> bool {
    const auto& trace = executor.run(tc);
    Signature sig = signature(trace, im);
    if (!sigs.insert(sig).second && dedup) return false;
    tc.meta.signature = sig;
    covered.merge_trace(trace);
    res.seeds.push_back(std::move(tc));
    return true;
  };

  auto target_covered = [&](const Target& t) {
    if (t.cond_key == 0 && !im.decisions[t.decision].single())
      return covered.decision_outcome(t.decision, t.outcome);
    return covered.condition_outcome(t.decision, t.cond_key, t.outcome);
  };

  if (opt.bmc) {
    int K = std::min(opt.unroll_bound, im.base.sample_count);
    if (K >= 1) {
      PathConstraintSystem pcs = unroll(im, K, opt.path_cap);
      res.report.paths_enumerated = pcs.paths_enumerated;
      res.report.enumeration_complete = pcs.enumeration_complete;
      for (size_t ti = 0; ti < pcs.targets.size(); ++ti) {
        Target& t = pcs.targets[ti];
        if (target_covered(t)) {
          t.status = TargetStatus::Solved;  // already reached by an earlier seed
          continue;
        }
        if (elapsed() > opt.budget_seconds) {
          t.status = TargetStatus::Unknown;
          continue;
        }
        SolveOutcome so = solve_target(pcs, static_cast<int>(ti), executor);
        t.status = so.status;
        if (so.status == TargetStatus::Solved && so.assignment) {
          if (add_seed(std::move(*so.assignment), /*dedup=*/true)) res.report.bmc_seeds++;
        }
      }
      for (const auto& t : pcs.targets) {
        TargetReport tr;
        tr.decision = t.decision;
        tr.cond_key = t.cond_key;
        tr.outcome = t.outcome;
        tr.first_step = t.first_step;
        tr.status = t.status;
        tr.search_only = t.search_only;
        res.report.targets.push_back(tr);
        switch (t.status) {
          case TargetStatus::Solved: res.report.solved++; break;
          case TargetStatus::UnsatWithinBound: res.report.unsat++; break;
          default: res.report.unknown++; break;
        }
      }
    }
  }

  // n-wise suites over constant ports that declare candidates
  std::vector<int> const_entries;
  std::vector<std::vector<double>> candidate_sets;
  for (size_t ei = 0; ei < layout.entries.size(); ++ei) {
    const auto& port = im.base.ports[layout.entries[ei].port_index];
    if (port.kind == PortKind::Constant && !port.candidates.empty()) {
      const_entries.push_back(static_cast<int>(ei));
      candidate_sets.push_back(port.candidates);
    }
  }
  if (!const_entries.empty()) {
    int n = std::min<int>(opt.nwise_n, static_cast<int>(const_entries.size()));
    if (n >= 1) {
      NWiseSuite suite = fast_nwise(n, candidate_sets, opt.seed);
      for (const auto& values : suite.cases) {
        TestCase tc;
        tc.bytes.assign(layout.total_bytes, 0);
        tc.meta.origin = SeedOrigin::Nwise;
        for (size_t i = 0; i < const_entries.size(); ++i) {
          const auto& e = layout.entries[const_entries[i]];
          for (int ch = 0; ch < e.width; ++ch)
            encode_scalar(tc.bytes.data() + e.offset + ch * type_size(e.value_type),
                          e.value_type, values[i]);
        }
        if (add_seed(std::move(tc), /*dedup=*/false)) res.report.nwise_seeds++;
      }
    }
  }

  // the all-zero case keeps the pool non-empty no matter what
  TestCase zero;
  zero.bytes.assign(layout.total_bytes, 0);
  zero.meta.origin = SeedOrigin::Random;
  add_seed(std::move(zero), /*dedup=*/false);

  res.report.seconds = elapsed();
  return res;
}

}  // namespace sigfuzz
