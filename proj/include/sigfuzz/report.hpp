#pragma once

#include <string>
#include <vector>

#include "sigfuzz/campaign.hpp"

namespace sigfuzz {

// Report directory layout:
//   summary.txt        human-readable overview
//   report.json        machine-readable report (config, metrics, decisions,
//                      seed targets, findings)
//   series.csv         elapsed,executions,unit_pct,cond_dec_pct,mcdc_pct
//   corpus/<origin>/<signature>.bin   final pool, raw buffers
//   corpus/layout.json                sidecar layout descriptor
//   findings/<n>_<kind>.bin           faulting inputs
void write_campaign_report(const std::string& dir, const InstrumentedModel& im,
                           const CampaignResult& result);

// Replay-only coverage report (no corpus/series emitted).
void write_coverage_report(const std::string& dir, const InstrumentedModel& im,
                           const CumulativeCoverage& cov, uint64_t cases_replayed);

std::string coverage_report_json(const InstrumentedModel& im, const CumulativeCoverage& cov);
std::string metrics_summary_text(const InstrumentedModel& im, const CumulativeCoverage& cov);

// Corpus persistence: raw byte buffers plus one layout sidecar per directory.
void write_corpus(const std::string& dir, const BufferLayout& layout,
                  const std::vector<TestCase>& cases);
std::vector<TestCase> load_corpus(const std::string& dir);

}  // namespace sigfuzz
