#include "sigfuzz/campaign.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>

namespace sigfuzz {

namespace {

// nominal desk-scale execution rate used for the virtual clock of
// exec-budget runs
constexpr double kNominalRate = 20000.0;

struct Shared {
  std::mutex mu;
  SeedPool pool;
  CumulativeCoverage cov;
  std::vector<SeriesRow>* series;
  std::vector<Finding>* findings;
  std::set<Signature> finding_sigs;
  std::atomic<uint64_t> executions{0};
  uint64_t accepted = 0, rejected = 0;
  uint64_t next_sample_exec = 0;
  std::chrono::steady_clock::time_point t0;
  double next_sample_time = 0;

  Shared(const InstrumentedModel& im) : pool(im), cov(im) {}
};

}  // namespace

CampaignResult fuzz_campaign(const InstrumentedModel& im, const CampaignConfig& cfg) {
  using clock = std::chrono::steady_clock;
  CampaignResult result(im);
  result.config = cfg;

  MutationConfig mcfg = cfg.mutation;
  if (!cfg.signal_mutations) {
    mcfg.square_signal = false;
    mcfg.curve_signal = false;
  }

  ConstantDictionary dict = mine_constants(im.base);
  BufferLayout layout = layout_test_buffer(im.base);
  Mutator mutator(im.base, layout, dict, mcfg);

  Shared sh(im);
  sh.series = &result.series;
  sh.findings = &result.findings;

  // initial pool
  SeedgenOptions sopt;
  sopt.unroll_bound = cfg.unroll_bound;
  sopt.budget_seconds = cfg.seedgen_budget;
  sopt.nwise_n = cfg.nwise_n;
  sopt.seed = cfg.seed;
  sopt.bmc = cfg.bmc_seeds;
  SeedgenResult seeds = generate_initial_seeds(im, sopt);
  result.seedgen = std::move(seeds.report);

  {
    Executor ex(im);
    for (auto& s : seeds.seeds) {
      const auto& trace = ex.run(s);
      sh.cov.merge_trace(trace);
      sh.pool.note_executed(trace);
      if (trace.fault && sh.finding_sigs.insert(*s.meta.signature).second)
        result.findings.push_back({trace.fault->kind, trace.fault->step, s.bytes});
      sh.pool.add(std::move(s), trace);
    }
  }
  result.seed_metrics = sh.cov.metrics();

  bool exec_mode = cfg.exec_budget > 0;
  sh.t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - sh.t0).count(); };

  auto sample_row = [&](bool force) {
    // caller holds the lock
    uint64_t ex = sh.executions.load(std::memory_order_relaxed);
    if (exec_mode) {
      if (!force && ex < sh.next_sample_exec) return;
      uint64_t step = std::max<uint64_t>(1, cfg.exec_budget / 256);
      sh.next_sample_exec = ex + step;
    } else {
      double t = elapsed();
      if (!force && t < sh.next_sample_time) return;
      sh.next_sample_time = t + cfg.sample_interval;
    }
    SeriesRow row;
    row.executions = ex;
    row.elapsed = exec_mode ? static_cast<double>(ex) / kNominalRate : elapsed();
    CoverageMetrics m = sh.cov.metrics();
    row.unit_pct = m.unit_pct;
    row.cond_dec_pct = m.cond_dec_pct;
    row.mcdc_pct = m.mcdc_pct;
    sh.series->push_back(row);
  };

  {
    std::lock_guard<std::mutex> lock(sh.mu);
    sample_row(true);  // the seed-only baseline row
  }

  auto out_of_budget = [&] {
    if (exec_mode) return sh.executions.load(std::memory_order_relaxed) >= cfg.exec_budget;
    return elapsed() >= cfg.budget_seconds;
  };

  auto worker_fn = [&](int wi) {
    Executor ex(im);
    Rng rng = Rng(cfg.seed).split(static_cast<uint64_t>(wi) + 1);
    std::vector<TestCase> pool_snapshot;  // the pool mutates while we fuzz
    std::vector<const TestCase*> pool_view;

    while (!out_of_budget()) {
      TestCase parent;
      bool fresh = false;
      {
        std::lock_guard<std::mutex> lock(sh.mu);
        if (sh.pool.size() == 0) return;
        int idx = sh.pool.seed_select(rng, sh.cov);
        parent = sh.pool.entry(idx).test;
        fresh = sh.pool.entry(idx).test.meta.select_times == 1;
        pool_snapshot.clear();
        for (size_t i = 0; i < sh.pool.size(); ++i)
          pool_snapshot.push_back(sh.pool.entry(static_cast<int>(i)).test);
      }
      pool_view.clear();
      for (const auto& tc : pool_snapshot) pool_view.push_back(&tc);

      auto run_child = [&](TestCase&& child) {
        const auto& trace = ex.run(child);
        Signature sig = signature(trace, im);
        std::lock_guard<std::mutex> lock(sh.mu);
        CoverageDelta delta = sh.cov.merge_trace(trace);
        if (trace.fault && sh.finding_sigs.insert(sig).second &&
            sh.findings->size() < 1024)
          sh.findings->push_back({trace.fault->kind, trace.fault->step, child.bytes});
        bool kept = pool_update(sh.pool, std::move(child), trace, delta, sig);
        if (kept)
          sh.accepted++;
        else
          sh.rejected++;
        sh.executions.fetch_add(1, std::memory_order_relaxed);
        sample_row(false);
      };

      // the first time a seed is picked, walk the deterministic byte flips
      if (fresh && mcfg.bit_flip) {
        for (auto& flipped : mutator.deterministic_bit_flips(parent.bytes)) {
          if (out_of_budget()) return;
          TestCase child;
          child.bytes = std::move(flipped);
          child.meta.origin = SeedOrigin::Mutation;
          run_child(std::move(child));
        }
      }
      for (int i = 0; i < mcfg.mutations_per_seed; ++i) {
        if (out_of_budget()) return;
        run_child(mutator.mutate(parent, rng, pool_view));
      }
    }
  };

  bool fuzz_budget_ok = cfg.exec_budget > 0 || cfg.budget_seconds > 0;
  if (fuzz_budget_ok && sh.pool.size() > 0) {
    int workers = std::max(1, cfg.workers);
    if (workers == 1) {
      worker_fn(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(worker_fn, w);
      for (auto& t : threads) t.join();
    }
  }

  {
    std::lock_guard<std::mutex> lock(sh.mu);
    sample_row(true);  // final row
  }

  result.final_metrics = sh.cov.metrics();
  result.executions = sh.executions.load();
  result.accepted = sh.accepted;
  result.rejected = sh.rejected;
  result.pool_size = sh.pool.size();
  result.corpus.reserve(sh.pool.size());
  for (size_t i = 0; i < sh.pool.size(); ++i)
    result.corpus.push_back(sh.pool.entry(static_cast<int>(i)).test);
  result.coverage = sh.cov;
  return result;
}

}  // namespace sigfuzz
