#include "sigfuzz/report.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace sigfuzz {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json decision_detail(const InstrumentedModel& im, const CumulativeCoverage& cov) {
  json out = json::array();
  for (const auto& d : im.decisions) {
    json jd;
    jd["id"] = d.id;
    jd["block"] = d.block_id;
    jd["label"] = d.label;
    jd["condition_count"] = d.condition_count;
    jd["decision_true"] = cov.decision_outcome(d.id, true);
    jd["decision_false"] = cov.decision_outcome(d.id, false);
    json conds = json::array();
    for (int i = 0; i < d.cond_key_count(); ++i) {
      int key = d.cond_key(i);
      json jc;
      jc["index"] = key;
      jc["true"] = cov.condition_outcome(d.id, key, true);
      jc["false"] = cov.condition_outcome(d.id, key, false);
      jc["mcdc"] = cov.mcdc_satisfied(d.id, key);
      conds.push_back(jc);
    }
    jd["conditions"] = conds;
    out.push_back(jd);
  }
  return out;
}

json metrics_json(const CoverageMetrics& m) {
  json j;
  j["unit_pct"] = m.unit_pct;
  j["cond_dec_pct"] = m.cond_dec_pct;
  j["mcdc_pct"] = m.mcdc_pct;
  j["units_covered"] = m.units_covered;
  j["units_total"] = m.units_total;
  j["outcomes_covered"] = m.outcomes_covered;
  j["outcomes_total"] = m.outcomes_total;
  j["mcdc_covered"] = m.mcdc_covered;
  j["mcdc_total"] = m.mcdc_total;
  return j;
}

const char* status_name(TargetStatus s) {
  switch (s) {
    case TargetStatus::Solved: return "solved";
    case TargetStatus::UnsatWithinBound: return "unsat-within-bound";
    case TargetStatus::Unknown: return "unknown";
    default: return "unsolved";
  }
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
}

std::string pct(double v) {
  char buf[64];
  snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

}  // namespace

std::string coverage_report_json(const InstrumentedModel& im, const CumulativeCoverage& cov) {
  json j;
  j["model"] = im.base.name;
  j["metrics"] = metrics_json(cov.metrics());
  j["decisions"] = decision_detail(im, cov);
  return j.dump(2);
}

std::string metrics_summary_text(const InstrumentedModel& im, const CumulativeCoverage& cov) {
  CoverageMetrics m = cov.metrics();
  std::string s;
  s += "model: " + im.base.name + "\n";
  s += "unit coverage:          " + pct(m.unit_pct) + " (" + std::to_string(m.units_covered) +
       "/" + std::to_string(m.units_total) + ")\n";
  s += "condition/decision:     " + pct(m.cond_dec_pct) + " (" +
       std::to_string(m.outcomes_covered) + "/" + std::to_string(m.outcomes_total) + ")\n";
  s += "mcdc:                   " + pct(m.mcdc_pct) + " (" + std::to_string(m.mcdc_covered) +
       "/" + std::to_string(m.mcdc_total) + ")\n";
  return s;
}

void write_corpus(const std::string& dir, const BufferLayout& layout,
                  const std::vector<TestCase>& cases) {
  fs::create_directories(dir);
  json lj;
  lj["total_bytes"] = layout.total_bytes;
  json entries = json::array();
  for (const auto& e : layout.entries) {
    json je;
    je["port"] = e.port_id;
    je["offset"] = e.offset;
    je["bytes_per_elem"] = e.bytes_per_elem;
    je["elem_count"] = e.elem_count;
    je["type"] = type_name(e.value_type);
    je["width"] = e.width;
    entries.push_back(je);
  }
  lj["entries"] = entries;
  write_file(fs::path(dir) / "layout.json", lj.dump(2));

  for (const auto& tc : cases) {
    // content-addressed names: distinct buffers never collide
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint8_t b : tc.bytes) h = (h ^ b) * 0x100000001b3ull;
    char name[32];
    snprintf(name, sizeof name, "%016llx", static_cast<unsigned long long>(h));
    fs::path sub = fs::path(dir) / origin_name(tc.meta.origin);
    fs::create_directories(sub);
    std::ofstream f(sub / (std::string(name) + ".bin"), std::ios::binary);
    f.write(reinterpret_cast<const char*>(tc.bytes.data()),
            static_cast<std::streamsize>(tc.bytes.size()));
  }
}

std::vector<TestCase> load_corpus(const std::string& dir) {
  std::vector<TestCase> cases;
  if (!fs::exists(dir)) return cases;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream f(p, std::ios::binary);
    TestCase tc;
    tc.bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    std::string origin = p.parent_path().filename().string();
    for (SeedOrigin o : {SeedOrigin::Bmc, SeedOrigin::Nwise, SeedOrigin::Mutation, SeedOrigin::Random})
      if (origin == origin_name(o)) tc.meta.origin = o;
    cases.push_back(std::move(tc));
  }
  return cases;
}

void write_campaign_report(const std::string& dir, const InstrumentedModel& im,
                           const CampaignResult& r) {
  fs::create_directories(dir);

  json j;
  j["model"] = im.base.name;
  json cfg;
  cfg["budget_seconds"] = r.config.budget_seconds;
  cfg["exec_budget"] = r.config.exec_budget;
  cfg["workers"] = r.config.workers;
  cfg["seed"] = r.config.seed;
  cfg["nwise"] = r.config.nwise_n;
  cfg["unroll"] = r.config.unroll_bound;
  cfg["bmc_seeds"] = r.config.bmc_seeds;
  cfg["signal_mutations"] = r.config.signal_mutations;
  cfg["mutations_per_seed"] = r.config.mutation.mutations_per_seed;
  j["config"] = cfg;
  j["seed_metrics"] = metrics_json(r.seed_metrics);
  j["final_metrics"] = metrics_json(r.final_metrics);
  j["executions"] = r.executions;
  j["accepted"] = r.accepted;
  j["rejected"] = r.rejected;
  j["pool_size"] = r.pool_size;
  j["decisions"] = decision_detail(im, r.coverage);

  json sg;
  sg["paths_enumerated"] = r.seedgen.paths_enumerated;
  sg["enumeration_complete"] = r.seedgen.enumeration_complete;
  sg["solved"] = r.seedgen.solved;
  sg["unsat_within_bound"] = r.seedgen.unsat;
  sg["unknown"] = r.seedgen.unknown;
  sg["bmc_seeds"] = r.seedgen.bmc_seeds;
  sg["nwise_seeds"] = r.seedgen.nwise_seeds;
  json tgts = json::array();
  for (const auto& t : r.seedgen.targets) {
    json jt;
    jt["decision"] = t.decision;
    jt["condition"] = t.cond_key;
    jt["outcome"] = t.outcome;
    jt["first_step"] = t.first_step;
    jt["status"] = status_name(t.status);
    jt["search_only"] = t.search_only;
    tgts.push_back(jt);
  }
  sg["targets"] = tgts;
  j["seedgen"] = sg;

  json fnd = json::array();
  for (const auto& f : r.findings) {
    json jf;
    jf["kind"] = fault_name(f.kind);
    jf["step"] = f.step;
    fnd.push_back(jf);
  }
  j["findings"] = fnd;

  write_file(fs::path(dir) / "report.json", j.dump(2));

  // series.csv
  std::string csv = "elapsed,executions,unit_pct,cond_dec_pct,mcdc_pct\n";
  char line[160];
  for (const auto& row : r.series) {
    snprintf(line, sizeof line, "%.3f,%llu,%.4f,%.4f,%.4f\n", row.elapsed,
             static_cast<unsigned long long>(row.executions), row.unit_pct, row.cond_dec_pct,
             row.mcdc_pct);
    csv += line;
  }
  write_file(fs::path(dir) / "series.csv", csv);

  // summary.txt
  std::string s = metrics_summary_text(im, r.coverage);
  s += "executions:             " + std::to_string(r.executions) + "\n";
  s += "pool size:              " + std::to_string(r.pool_size) + " (accepted " +
       std::to_string(r.accepted) + ", rejected " + std::to_string(r.rejected) + ")\n";
  s += "seed targets:           solved " + std::to_string(r.seedgen.solved) + ", unsat " +
       std::to_string(r.seedgen.unsat) + ", unknown " + std::to_string(r.seedgen.unknown) + "\n";
  s += "findings:               " + std::to_string(r.findings.size()) + "\n";
  write_file(fs::path(dir) / "summary.txt", s);

  write_corpus((fs::path(dir) / "corpus").string(), layout_test_buffer(im.base), r.corpus);

  if (!r.findings.empty()) {
    fs::path fdir = fs::path(dir) / "findings";
    fs::create_directories(fdir);
    int i = 0;
    for (const auto& f : r.findings) {
      std::ofstream out(fdir / (std::to_string(i++) + "_" + fault_name(f.kind) + ".bin"),
                        std::ios::binary);
      out.write(reinterpret_cast<const char*>(f.bytes.data()),
                static_cast<std::streamsize>(f.bytes.size()));
    }
  }
}

void write_coverage_report(const std::string& dir, const InstrumentedModel& im,
                           const CumulativeCoverage& cov, uint64_t cases_replayed) {
  fs::create_directories(dir);
  json j = json::parse(coverage_report_json(im, cov));
  j["cases_replayed"] = cases_replayed;
  write_file(fs::path(dir) / "report.json", j.dump(2));
  std::string s = metrics_summary_text(im, cov);
  s += "cases replayed:         " + std::to_string(cases_replayed) + "\n";
  write_file(fs::path(dir) / "summary.txt", s);
}

}  // namespace sigfuzz
