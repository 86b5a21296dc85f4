#include <doctest.h>

#include "helpers.hpp"
#include "sigfuzz/coverage.hpp"

using namespace sigfuzz;
using namespace testutil;

namespace {

// instrumented two-condition "a && b" scaffold used by several cases
InstrumentedModel and2_model(ModelIR* out) {
  *out = parse_or_die(R"(
model and2 samples=1
port a in signal bool
port b in signal bool
port y out signal bool
block g LogicOp {op=and}
link a.0 -> g.0
link b.0 -> g.1
link g.0 -> y.0
)");
  return instrument_or_die(*out);
}

ExecutionTrace trace_with(const InstrumentedModel& im, int decision,
                          std::vector<DecisionEval> evs) {
  ExecutionTrace t;
  t.evaluations.resize(im.decisions.size());
  t.evaluations[decision] = std::move(evs);
  t.unit_hits.assign(im.unit_count, 1);
  t.steps_executed = 1;
  return t;
}

}  // namespace

TEST_CASE("record sets the addressed bit and passes the result through") {
  CoverageVector v{0};
  CHECK(record(true, 0, v) == true);
  CHECK(v.word == 0b1);

  CoverageVector w{0};
  CHECK(record(false, 2, w) == false);
  CHECK(w.word == 0);

  CoverageVector x{0};
  record(true, 3, x);
  record(true, 0, x);
  CHECK(x.word == 0b1001);
}

TEST_CASE("record on a bitmap slot addressed by decision index") {
  std::vector<CoverageVector> bitmap(4);
  record(true, 1, 2, bitmap);
  CHECK(bitmap[2].word == 0b10);
  CHECK(bitmap[0].word == 0);
}

TEST_CASE("dec_flipped spec vectors") {
  CHECK(dec_flipped(CoverageVector{0b011}, CoverageVector{0b110}));
  CHECK_FALSE(dec_flipped(CoverageVector{0b011}, CoverageVector{0b011}));
  CHECK(dec_flipped(CoverageVector{0b10}, CoverageVector{0b11}));
}

TEST_CASE("cond_flipped spec vectors") {
  // (0b01 xor 0b11) == 0b10 == 1<<(2-1)
  CHECK(cond_flipped(CoverageVector{0b011}, CoverageVector{0b110}, 2));
  // two conditions flipped at once never counts
  CHECK_FALSE(cond_flipped(CoverageVector{0b011}, CoverageVector{0b101}, 1));
  for (int c = 1; c <= 3; ++c) CHECK_FALSE(cond_flipped(CoverageVector{0b101}, CoverageVector{0b101}, c));
}

TEST_CASE("cond_flipped equals the popcount predicate on random pairs") {
  Rng rng(2024);
  for (int trial = 0; trial < 20000; ++trial) {
    int n = 1 + static_cast<int>(rng.below(8));
    uint64_t mask = ((1ull << n) - 1) << 1;
    CoverageVector v1{rng.next() & (mask | 1)};
    CoverageVector v2{rng.next() & (mask | 1)};
    uint64_t diff = (v1.word >> 1) ^ (v2.word >> 1);
    for (int c = 1; c <= n; ++c) {
      bool expect = __builtin_popcountll(diff) == 1 && (diff >> (c - 1)) == 1;
      CHECK(cond_flipped(v1, v2, c) == expect);
    }
  }
}

TEST_CASE("mcdc_update: a&&b pair flips the decision and condition 1 only") {
  ModelIR m;
  InstrumentedModel im = and2_model(&m);
  int d = im.block_decision[m.block_index("g")];
  CumulativeCoverage cov(im);

  // full-recording vectors as the logic block produces them:
  // (a=T,b=T) -> dec 1, c1 1, c2 1; (a=F,b=T) -> dec 0, c1 0, c2 1
  auto t = trace_with(im, d, {{0b111, 0b111}, {0b100, 0b111}});
  auto delta = cov.merge_trace(t);
  REQUIRE(delta.new_mcdc.size() == 1);
  CHECK(delta.new_mcdc[0] == std::make_pair(d, 1));
  CHECK(cov.mcdc_satisfied(d, 1));
  CHECK_FALSE(cov.mcdc_satisfied(d, 2));
}

TEST_CASE("single-condition decision: both outcomes give mcdc at key 0") {
  ModelIR m = parse_or_die(R"(
model one samples=1
port a in signal int32
port y out signal bool
block c RelationalOp {op=">", in1=0}
link a.0 -> c.0
link c.0 -> y.0
)");
  InstrumentedModel im = instrument_or_die(m);
  CumulativeCoverage cov(im);
  auto t = trace_with(im, 0, {{0b1, 0b1}, {0b0, 0b1}});
  auto delta = cov.merge_trace(t);
  REQUIRE(delta.new_mcdc.size() == 1);
  CHECK(delta.new_mcdc[0] == std::make_pair(0, 0));
  // for a one-condition decision this equals decision coverage
  CHECK(cov.decision_outcome(0, true));
  CHECK(cov.decision_outcome(0, false));
}

TEST_CASE("identical vector sets on replay produce an empty delta") {
  ModelIR m;
  InstrumentedModel im = and2_model(&m);
  CumulativeCoverage cov(im);
  auto t = trace_with(im, 0, {{0b111, 0b111}, {0b010, 0b111}});
  cov.merge_trace(t);
  auto again = cov.merge_trace(t);
  CHECK(again.empty());
}

TEST_CASE("merge_trace: first trace reports its full coverage as the delta") {
  ModelIR m;
  InstrumentedModel im = and2_model(&m);
  CumulativeCoverage cov(im);
  auto t = trace_with(im, 0, {{0b111, 0b111}});
  auto delta = cov.merge_trace(t);
  CHECK(delta.new_decision_outcomes.size() == 1);
  CHECK(delta.new_condition_outcomes.size() == 2);
  CHECK(delta.new_units.size() == 1);
}

TEST_CASE("merge_trace: ondlc threshold decision gains its true outcome") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  Executor ex(im);
  CumulativeCoverage cov(im);

  BufferLayout l = ex.layout();
  TestCase quiet;
  quiet.bytes.assign(l.total_bytes, 0);
  cov.merge_trace(ex.run(quiet));
  CHECK_FALSE(cov.decision_outcome(1, true));

  TestCase firing;
  firing.bytes.assign(l.total_bytes, 0);
  for (int i = 0; i < 5; ++i)
    encode_scalar(firing.bytes.data() + i * 4, ValueType::I32, 10);
  encode_scalar(firing.bytes.data() + 80, ValueType::I32, 5);
  auto delta = cov.merge_trace(ex.run(firing));
  bool got_true = false;
  for (auto [d, outcome] : delta.new_decision_outcomes)
    if (d == 1 && outcome) got_true = true;
  CHECK(got_true);
}

TEST_CASE("short-circuited conditions never count as outcomes") {
  ModelIR m = parse_or_die(R"(
model sc samples=1
port a in signal int32
port b in signal int32
port y out signal bool
block s Script in{a:int32, b:int32} out{y:bool} body{ y = a > 0 || b > 0; }
link a.0 -> s.0
link b.0 -> s.1
link s.0 -> y.0
)");
  InstrumentedModel im = instrument_or_die(m);
  Executor ex(im);
  CumulativeCoverage cov(im);
  TestCase tc;
  tc.bytes.assign(ex.layout().total_bytes, 0);
  encode_scalar(tc.bytes.data(), ValueType::I32, 7);  // a=7: b never evaluated
  cov.merge_trace(ex.run(tc));
  CHECK(cov.condition_outcome(0, 1, true));
  CHECK(cov.condition_outcome_count(0, 2) == 0);
}

TEST_CASE("coverage percentages are monotone under random merges") {
  ModelIR m = parse_or_die(read_file(bench_path("guidance.ir")));
  InstrumentedModel im = instrument_or_die(m);
  Executor ex(im);
  CumulativeCoverage cov(im);
  Rng rng(77);
  CoverageMetrics prev = cov.metrics();
  for (int i = 0; i < 300; ++i) {
    TestCase tc;
    tc.bytes.resize(ex.layout().total_bytes);
    for (auto& b : tc.bytes) b = static_cast<uint8_t>(rng.next());
    cov.merge_trace(ex.run(tc));
    CoverageMetrics now = cov.metrics();
    CHECK(now.unit_pct >= prev.unit_pct);
    CHECK(now.cond_dec_pct >= prev.cond_dec_pct);
    CHECK(now.mcdc_pct >= prev.mcdc_pct);
    CHECK(now.cond_dec_pct <= 100.0);
    prev = now;
  }
}

TEST_CASE("mcdc pairs match the truth-table oracle over full-recording vectors") {
  Rng rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng.below(5));
    auto tree = random_bool_tree(rng, 1, n);

    // synthetic decision table with one n-condition decision
    ModelIR m;
    InstrumentedModel im;
    im.base.name = "synthetic";
    im.unit_count = 0;
    DecisionInfo info;
    info.id = 0;
    info.block_id = "syn";
    info.condition_count = n;
    im.decisions.push_back(info);
    im.cond_base = {0};
    im.total_cond_keys = n;

    CumulativeCoverage cov(im);
    std::vector<std::vector<DecisionEval>> evals(1);
    for (uint64_t a = 0; a < (1ull << n); ++a) {
      CoverageVector vec{0};
      for (int c = 1; c <= n; ++c) record((a >> (c - 1)) & 1, c, vec);
      bool dec = tree->eval(a);
      record(dec, 0, vec);
      evals[0].push_back({vec.word, ~0ull});
    }
    auto newly = cov.mcdc_update(evals);

    std::set<int> got;
    for (auto [d, c] : newly) got.insert(c);
    std::set<int> expect =
        mcdc_truth_table_oracle(n, [&](uint64_t a) { return tree->eval(a); });
    CHECK(got == expect);
  }
}

TEST_CASE("cross-trace pairing: history from earlier traces completes pairs") {
  ModelIR m;
  InstrumentedModel im = and2_model(&m);
  CumulativeCoverage cov(im);
  cov.merge_trace(trace_with(im, 0, {{0b111, 0b111}}));
  CHECK_FALSE(cov.mcdc_satisfied(0, 1));
  // the matching vector arrives in a separate trace
  cov.merge_trace(trace_with(im, 0, {{0b100, 0b111}}));
  CHECK(cov.mcdc_satisfied(0, 1));
}

// --- signatures ---------------------------------------------------------------

TEST_CASE("signature depends on coverage, not output values") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  Executor ex(im);
  BufferLayout l = ex.layout();

  // same coverage sets (u never equals 10, threshold never fires), different bytes
  TestCase a, b;
  a.bytes.assign(l.total_bytes, 0);
  b.bytes.assign(l.total_bytes, 0);
  encode_scalar(a.bytes.data(), ValueType::I32, 3);
  encode_scalar(b.bytes.data(), ValueType::I32, 4);
  Signature sa = signature(ex.run(a), im);
  Signature sb = signature(ex.run(b), im);
  CHECK(sa == sb);

  // covering one extra outcome changes it
  TestCase c;
  c.bytes.assign(l.total_bytes, 0);
  encode_scalar(c.bytes.data(), ValueType::I32, 10);
  Signature sc = signature(ex.run(c), im);
  CHECK_FALSE(sa == sc);
}

TEST_CASE("empty trace has a well-defined constant signature") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  ExecutionTrace t;
  t.evaluations.resize(im.decisions.size());
  Signature s1 = signature(t, im);
  Signature s2 = signature(t, im);
  CHECK(s1 == s2);
  CHECK((s1.hi != 0 || s1.lo != 0));
}

TEST_CASE("signature is evaluation-order independent") {
  ModelIR m;
  InstrumentedModel im = and2_model(&m);
  ExecutionTrace t1 = trace_with(im, 0, {{0b111, 0b111}, {0b010, 0b111}});
  ExecutionTrace t2 = trace_with(im, 0, {{0b010, 0b111}, {0b111, 0b111}});
  CHECK(signature(t1, im) == signature(t2, im));
}
