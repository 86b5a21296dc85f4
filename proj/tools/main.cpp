#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigfuzz/campaign.hpp"
#include "sigfuzz/nwise.hpp"
#include "sigfuzz/report.hpp"

namespace fs = std::filesystem;
using namespace sigfuzz;

namespace {

int load_model(const std::string& path, ModelIR* out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot read model file '" << path << "'\n";
    return 1;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  ParseResult res = parse_model(ss.str());
  if (!res.ok()) {
    for (const auto& d : res.diagnostics) std::cerr << path << ":" << d.to_string() << "\n";
    return 2;
  }
  *out = std::move(*res.model);
  return 0;
}

int load_instrumented(const std::string& path, ModelIR* model, InstrumentedModel* im) {
  if (int rc = load_model(path, model)) return rc;
  InstrumentResult ir = instrument(*model);
  if (!ir.ok()) {
    for (const auto& d : ir.diagnostics) std::cerr << path << ":" << d.to_string() << "\n";
    return 2;
  }
  *im = std::move(*ir.model);
  return 0;
}

struct CampaignFlags {
  std::string model_path;
  double budget = 60.0;
  uint64_t exec_budget = 0;
  int workers = 1;
  uint64_t seed = 1;
  int nwise = 2;
  int unroll = kDefaultUnrollBound;
  double seed_budget = 5.0;
  int mutations_per_seed = 256;
  int math_max = 16;
  bool no_signal_mutations = false;
  bool no_bmc_seeds = false;
  std::string report_dir;

  void attach(CLI::App* cmd, bool with_budget = true) {
    cmd->add_option("model", model_path, "model IR file")->required();
    if (with_budget) {
      cmd->add_option("--budget", budget, "fuzzing budget in seconds");
      cmd->add_option("--exec-budget", exec_budget,
                      "stop after exactly N executions (deterministic with --workers 1)");
    }
    cmd->add_option("--workers", workers, "fuzzing worker threads");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--nwise", nwise, "n-wise strength for constant ports");
    cmd->add_option("--unroll", unroll, "unroll bound K for seed generation");
    cmd->add_option("--seed-budget", seed_budget, "seconds for the seed-generation stage");
    cmd->add_option("--mutations-per-seed", mutations_per_seed, "children per selected seed");
    cmd->add_option("--math-max", math_max, "largest math-mutation operand");
    cmd->add_flag("--no-signal-mutations", no_signal_mutations,
                  "disable the square/curve signal operators");
    cmd->add_flag("--no-bmc-seeds", no_bmc_seeds, "skip the bounded-unroll seed stage");
    cmd->add_option("--report", report_dir, "report directory");
  }

  CampaignConfig to_config() const {
    CampaignConfig cfg;
    cfg.budget_seconds = budget;
    cfg.exec_budget = exec_budget;
    cfg.workers = workers;
    cfg.seed = seed;
    cfg.nwise_n = nwise;
    cfg.unroll_bound = unroll;
    cfg.seedgen_budget = seed_budget;
    cfg.bmc_seeds = !no_bmc_seeds;
    cfg.signal_mutations = !no_signal_mutations;
    cfg.mutation.mutations_per_seed = mutations_per_seed;
    cfg.mutation.math_max = math_max;
    return cfg;
  }
};

int cmd_run(const CampaignFlags& flags) {
  ModelIR model;
  InstrumentedModel im;
  if (int rc = load_instrumented(flags.model_path, &model, &im)) return rc;

  CampaignResult result = fuzz_campaign(im, flags.to_config());
  std::cout << metrics_summary_text(im, result.coverage);
  std::cout << "executions: " << result.executions << ", pool: " << result.pool_size
            << ", findings: " << result.findings.size() << "\n";
  if (!flags.report_dir.empty()) {
    write_campaign_report(flags.report_dir, im, result);
    std::cout << "report written to " << flags.report_dir << "\n";
  }
  return 0;
}

int cmd_ablate(const CampaignFlags& flags, int trials, int jobs) {
  ModelIR model;
  InstrumentedModel im;
  if (int rc = load_instrumented(flags.model_path, &model, &im)) return rc;

  struct Arm {
    CoverageMetrics metrics;
    std::vector<SeriesRow> series;
  };
  std::vector<Arm> full(trials), raw(trials);

  auto run_trial = [&](int t) {
    CampaignConfig base = flags.to_config();
    base.seed = flags.seed + static_cast<uint64_t>(t);
    CampaignConfig cfg_full = base;
    cfg_full.signal_mutations = true;
    CampaignConfig cfg_raw = base;
    cfg_raw.signal_mutations = false;
    CampaignResult rf = fuzz_campaign(im, cfg_full);
    CampaignResult rr = fuzz_campaign(im, cfg_raw);
    full[t] = {rf.final_metrics, rf.series};
    raw[t] = {rr.final_metrics, rr.series};
  };

  if (jobs <= 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_trial(t);
      });
    for (auto& th : pool) th.join();
  }

  int wins = 0, ties = 0;
  printf("%-7s %-24s %s\n", "trial", "signal-on cond/dec, mcdc", "signal-off cond/dec, mcdc");
  for (int t = 0; t < trials; ++t) {
    printf("%-7d %6.2f%% %6.2f%%          %6.2f%% %6.2f%%\n", t, full[t].metrics.cond_dec_pct,
           full[t].metrics.mcdc_pct, raw[t].metrics.cond_dec_pct, raw[t].metrics.mcdc_pct);
    if (full[t].metrics.cond_dec_pct > raw[t].metrics.cond_dec_pct)
      wins++;
    else if (full[t].metrics.cond_dec_pct == raw[t].metrics.cond_dec_pct)
      ties++;
  }
  printf("signal mutations strictly ahead in %d/%d trials (%d ties)\n", wins, trials, ties);

  if (!flags.report_dir.empty()) {
    fs::create_directories(flags.report_dir);
    nlohmann::json j;
    j["model"] = im.base.name;
    j["trials"] = trials;
    j["budget_seconds"] = flags.budget;
    j["exec_budget"] = flags.exec_budget;
    nlohmann::json rows = nlohmann::json::array();
    for (int t = 0; t < trials; ++t) {
      nlohmann::json r;
      r["trial"] = t;
      r["full_cond_dec_pct"] = full[t].metrics.cond_dec_pct;
      r["full_mcdc_pct"] = full[t].metrics.mcdc_pct;
      r["raw_cond_dec_pct"] = raw[t].metrics.cond_dec_pct;
      r["raw_mcdc_pct"] = raw[t].metrics.mcdc_pct;
      rows.push_back(r);
    }
    j["rows"] = rows;
    j["full_strictly_ahead"] = wins;
    j["ties"] = ties;
    std::ofstream(fs::path(flags.report_dir) / "ablate.json") << j.dump(2);

    auto dump_series = [&](const char* tag, int t, const std::vector<SeriesRow>& series) {
      std::ofstream f(fs::path(flags.report_dir) /
                      ("trial" + std::to_string(t) + "_" + tag + ".csv"));
      f << "elapsed,executions,unit_pct,cond_dec_pct,mcdc_pct\n";
      for (const auto& row : series)
        f << row.elapsed << "," << row.executions << "," << row.unit_pct << ","
          << row.cond_dec_pct << "," << row.mcdc_pct << "\n";
    };
    for (int t = 0; t < trials; ++t) {
      dump_series("full", t, full[t].series);
      dump_series("raw", t, raw[t].series);
    }
    std::cout << "ablation data written to " << flags.report_dir << "\n";
  }
  return 0;
}

int cmd_coverage(const std::string& corpus_dir, const std::string& model_path,
                 const std::string& report_dir) {
  ModelIR model;
  InstrumentedModel im;
  if (int rc = load_instrumented(model_path, &model, &im)) return rc;

  BufferLayout layout = layout_test_buffer(im.base);
  std::vector<TestCase> cases = load_corpus(corpus_dir);
  Executor ex(im);
  CumulativeCoverage cov(im);
  uint64_t replayed = 0;
  for (auto& tc : cases) {
    if (tc.bytes.size() != layout.total_bytes) {
      std::cerr << "error: corpus case of " << tc.bytes.size() << " bytes does not match the "
                << layout.total_bytes << "-byte layout of model '" << im.base.name << "'\n";
      return 2;
    }
    cov.merge_trace(ex.run(tc));
    replayed++;
  }
  std::cout << metrics_summary_text(im, cov);
  std::cout << "cases replayed: " << replayed << "\n";
  if (!report_dir.empty()) write_coverage_report(report_dir, im, cov, replayed);
  return 0;
}

int cmd_seeds(const CampaignFlags& flags) {
  ModelIR model;
  InstrumentedModel im;
  if (int rc = load_instrumented(flags.model_path, &model, &im)) return rc;

  SeedgenOptions opt;
  opt.unroll_bound = flags.unroll;
  opt.budget_seconds = flags.seed_budget;
  opt.nwise_n = flags.nwise;
  opt.seed = flags.seed;
  opt.bmc = !flags.no_bmc_seeds;
  SeedgenResult res = generate_initial_seeds(im, opt);

  std::cout << "seeds: " << res.seeds.size() << " (bmc " << res.report.bmc_seeds << ", nwise "
            << res.report.nwise_seeds << ")\n";
  std::cout << "targets: solved " << res.report.solved << ", unsat-within-bound "
            << res.report.unsat << ", unknown " << res.report.unknown << "\n";
  for (const auto& t : res.report.targets) {
    const auto& d = im.decisions[t.decision];
    const char* status = t.status == TargetStatus::Solved ? "solved"
                         : t.status == TargetStatus::UnsatWithinBound ? "unsat-within-bound"
                                                                      : "unknown";
    std::cout << "  d" << t.decision << "/c" << t.cond_key << "=" << (t.outcome ? "T" : "F")
              << " [" << d.block_id << "] " << status << (t.search_only ? " (search-only)" : "")
              << "\n";
  }
  if (!flags.report_dir.empty()) {
    fs::create_directories(flags.report_dir);
    write_corpus((fs::path(flags.report_dir) / "corpus").string(), layout_test_buffer(im.base),
                 res.seeds);
    nlohmann::json j;
    j["model"] = im.base.name;
    j["seeds"] = res.seeds.size();
    j["bmc_seeds"] = res.report.bmc_seeds;
    j["nwise_seeds"] = res.report.nwise_seeds;
    j["solved"] = res.report.solved;
    j["unsat_within_bound"] = res.report.unsat;
    j["unknown"] = res.report.unknown;
    j["paths_enumerated"] = res.report.paths_enumerated;
    j["enumeration_complete"] = res.report.enumeration_complete;
    nlohmann::json tgts = nlohmann::json::array();
    for (const auto& t : res.report.targets) {
      nlohmann::json jt;
      jt["decision"] = t.decision;
      jt["condition"] = t.cond_key;
      jt["outcome"] = t.outcome;
      jt["first_step"] = t.first_step;
      jt["status"] = t.status == TargetStatus::Solved ? "solved"
                     : t.status == TargetStatus::UnsatWithinBound ? "unsat-within-bound"
                                                                  : "unknown";
      jt["search_only"] = t.search_only;
      tgts.push_back(jt);
    }
    j["targets"] = tgts;
    std::ofstream(fs::path(flags.report_dir) / "seedgen.json") << j.dump(2);
    std::cout << "seed corpus written to " << flags.report_dir << "\n";
  }
  return 0;
}

int cmd_nwise(const std::string& model_path, int n, uint64_t seed) {
  ModelIR model;
  if (int rc = load_model(model_path, &model)) return rc;
  std::vector<std::string> names;
  std::vector<std::vector<double>> candidates;
  for (const auto& p : model.ports) {
    if (p.direction == PortDirection::In && p.kind == PortKind::Constant &&
        !p.candidates.empty()) {
      names.push_back(p.id);
      candidates.push_back(p.candidates);
    }
  }
  if (candidates.empty()) {
    std::cerr << "error: model has no constant ports with candidates\n";
    return 2;
  }
  NWiseSuite suite;
  try {
    suite = fast_nwise(n, candidates, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  for (size_t i = 0; i < names.size(); ++i) std::cout << (i ? "," : "") << names[i];
  std::cout << "\n";
  for (const auto& c : suite.cases) {
    for (size_t i = 0; i < c.size(); ++i) std::cout << (i ? "," : "") << c[i];
    std::cout << "\n";
  }
  std::cerr << suite.cases.size() << " cases\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sigfuzz: coverage-guided model fuzzing with signal-pattern mutations"};
  app.require_subcommand(1);

  CampaignFlags run_flags;
  auto* run = app.add_subcommand("run", "seed, fuzz, and report on one model");
  run->alias("fuzz");
  run_flags.attach(run);

  CampaignFlags ablate_flags;
  int trials = 10;
  int jobs = 1;
  auto* ablate =
      app.add_subcommand("ablate", "paired trials: signal mutations on vs off, matched seeds");
  ablate_flags.attach(ablate);
  ablate->add_option("--trials", trials, "number of paired trials");
  ablate->add_option("--jobs", jobs, "trial pairs to run concurrently");

  std::string corpus_dir, cov_model, cov_report;
  auto* coverage = app.add_subcommand("coverage", "replay a corpus and report merged coverage");
  coverage->add_option("corpus", corpus_dir, "corpus directory")->required();
  coverage->add_option("model", cov_model, "model IR file")->required();
  coverage->add_option("--report", cov_report, "report directory");

  CampaignFlags seeds_flags;
  auto* seeds = app.add_subcommand("seeds", "generate and report initial seeds only");
  seeds_flags.attach(seeds, /*with_budget=*/false);

  std::string nwise_model;
  int nwise_n = 2;
  uint64_t nwise_seed = 1;
  auto* nwise = app.add_subcommand("nwise", "print an n-wise suite for the constant ports");
  nwise->add_option("model", nwise_model, "model IR file")->required();
  nwise->add_option("--n", nwise_n, "strength");
  nwise->add_option("--seed", nwise_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (ablate->parsed()) return cmd_ablate(ablate_flags, trials, jobs);
    if (coverage->parsed()) return cmd_coverage(corpus_dir, cov_model, cov_report);
    if (seeds->parsed()) return cmd_seeds(seeds_flags);
    if (nwise->parsed()) return cmd_nwise(nwise_model, nwise_n, nwise_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
