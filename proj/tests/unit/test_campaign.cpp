#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "sigfuzz/campaign.hpp"
#include "sigfuzz/report.hpp"

using namespace sigfuzz;
using namespace testutil;

TEST_CASE("zero budget reports exactly the initial-pool coverage") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  CampaignConfig cfg;
  cfg.budget_seconds = 0;
  CampaignResult r = fuzz_campaign(im, cfg);
  CHECK(r.executions == 0);
  CHECK(r.final_metrics.cond_dec_pct == r.seed_metrics.cond_dec_pct);
  CHECK(r.series.size() >= 1);
  CHECK(r.pool_size >= 1);
}

TEST_CASE("exec-budget campaigns are fully deterministic") {
  ModelIR m = parse_or_die(read_file(bench_path("guidance.ir")));
  InstrumentedModel im = instrument_or_die(m);
  CampaignConfig cfg;
  cfg.exec_budget = 20000;
  cfg.seed = 77;
  CampaignResult a = fuzz_campaign(im, cfg);
  CampaignResult b = fuzz_campaign(im, cfg);
  CHECK(a.executions == b.executions);
  CHECK(a.accepted == b.accepted);
  CHECK(a.rejected == b.rejected);
  CHECK(a.pool_size == b.pool_size);
  REQUIRE(a.series.size() == b.series.size());
  for (size_t i = 0; i < a.series.size(); ++i) {
    CHECK(a.series[i].executions == b.series[i].executions);
    CHECK(a.series[i].cond_dec_pct == b.series[i].cond_dec_pct);
    CHECK(a.series[i].mcdc_pct == b.series[i].mcdc_pct);
  }
  REQUIRE(a.corpus.size() == b.corpus.size());
  for (size_t i = 0; i < a.corpus.size(); ++i) CHECK(a.corpus[i].bytes == b.corpus[i].bytes);
}

TEST_CASE("coverage series is non-decreasing and dominates the seed baseline") {
  ModelIR m = parse_or_die(read_file(bench_path("oshotc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  CampaignConfig cfg;
  cfg.exec_budget = 60000;
  cfg.seed = 5;
  CampaignResult r = fuzz_campaign(im, cfg);
  REQUIRE(r.series.size() >= 2);
  for (size_t i = 1; i < r.series.size(); ++i) {
    CHECK(r.series[i].cond_dec_pct >= r.series[i - 1].cond_dec_pct);
    CHECK(r.series[i].mcdc_pct >= r.series[i - 1].mcdc_pct);
    CHECK(r.series[i].unit_pct >= r.series[i - 1].unit_pct);
  }
  CHECK(r.final_metrics.cond_dec_pct >= r.seed_metrics.cond_dec_pct);
  CHECK(r.final_metrics.cond_dec_pct > r.seed_metrics.cond_dec_pct);  // oshotc gains
}

TEST_CASE("faulting children land in findings regardless of coverage") {
  ModelIR m = parse_or_die(R"(
model faulty samples=4
port a in signal int32 range 0 20
port y out signal int32
block s Script in{a:int32} out{y:int32} body{ y = 100 / (a - 10); }
link a.0 -> s.0
link s.0 -> y.0
)");
  InstrumentedModel im = instrument_or_die(m);
  CampaignConfig cfg;
  cfg.exec_budget = 30000;
  cfg.seed = 2;
  CampaignResult r = fuzz_campaign(im, cfg);
  CHECK(r.findings.size() >= 1);
  for (const auto& f : r.findings) CHECK(f.kind == FaultKind::IntDivByZero);
}

TEST_CASE("multi-worker campaigns share the pool under the budget") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  CampaignConfig cfg;
  cfg.budget_seconds = 1.0;
  cfg.workers = 2;
  cfg.seed = 9;
  CampaignResult r = fuzz_campaign(im, cfg);
  CHECK(r.executions > 1000);
  CHECK(r.final_metrics.cond_dec_pct >= r.seed_metrics.cond_dec_pct);
}

TEST_CASE("campaign report round-trips through the corpus replayer") {
  namespace fs = std::filesystem;
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  CampaignConfig cfg;
  cfg.exec_budget = 40000;
  cfg.seed = 13;
  CampaignResult r = fuzz_campaign(im, cfg);

  fs::path dir = fs::temp_directory_path() / "sigfuzz_test_report";
  fs::remove_all(dir);
  write_campaign_report(dir.string(), im, r);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(fs::exists(dir / "series.csv"));
  CHECK(fs::exists(dir / "corpus" / "layout.json"));

  // replaying the written corpus reproduces the campaign's final coverage
  std::vector<TestCase> corpus = load_corpus((dir / "corpus").string());
  CHECK(corpus.size() == r.corpus.size());
  Executor ex(im);
  CumulativeCoverage cov(im);
  for (auto& tc : corpus) cov.merge_trace(ex.run(tc));
  CoverageMetrics replayed = cov.metrics();
  CHECK(replayed.cond_dec_pct == r.final_metrics.cond_dec_pct);
  CHECK(replayed.mcdc_pct == r.final_metrics.mcdc_pct);
  CHECK(replayed.unit_pct == r.final_metrics.unit_pct);
  fs::remove_all(dir);
}

TEST_CASE("ablation flags actually disable their stages") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);

  CampaignConfig cfg;
  cfg.exec_budget = 5000;
  cfg.bmc_seeds = false;
  CampaignResult r = fuzz_campaign(im, cfg);
  CHECK(r.seedgen.bmc_seeds == 0);
  CHECK(r.seedgen.targets.empty());

  CampaignConfig cfg2;
  cfg2.exec_budget = 5000;
  cfg2.signal_mutations = false;
  CampaignResult r2 = fuzz_campaign(im, cfg2);
  CHECK(r2.executions == 5000);
}
