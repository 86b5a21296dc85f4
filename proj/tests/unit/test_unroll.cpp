#include <doctest.h>

#include "helpers.hpp"
#include "sigfuzz/unroll.hpp"

using namespace sigfuzz;
using namespace testutil;

TEST_CASE("relational block at K=1 gives two solvable targets") {
  ModelIR m = parse_or_die(R"(
model rel samples=4
port in1 in signal int32 range -100 100
port y out signal bool
block cmp RelationalOp {op=">", in1=0}
link in1.0 -> cmp.0
link cmp.0 -> y.0
)");
  InstrumentedModel im = instrument_or_die(m);
  PathConstraintSystem pcs = unroll(im, 1);
  CHECK(pcs.enumeration_complete);
  CHECK(pcs.paths.size() == 2);
  REQUIRE(pcs.targets.size() == 2);

  // both outcomes carry the comparison constraint in opposite polarity
  int t_true = pcs.target_index(0, 0, true);
  int t_false = pcs.target_index(0, 0, false);
  REQUIRE(t_true >= 0);
  REQUIRE(t_false >= 0);

  Executor ex(im);
  SolveOutcome a = solve_target(pcs, t_true, ex);
  REQUIRE(a.status == TargetStatus::Solved);
  // any assignment with in1 >= 1; re-execution proved it already, spot-check
  double v = decode_scalar(a.assignment->bytes.data(), ValueType::I32);
  CHECK(v >= 1);

  SolveOutcome b = solve_target(pcs, t_false, ex);
  CHECK(b.status == TargetStatus::Solved);
}

TEST_CASE("contrived dead branch is unsat within the bound") {
  ModelIR m = parse_or_die(R"(
model dead samples=2
port in1 in signal int32 range -50 50
port y out signal bool
block s Script in{v:int32} out{y:bool} body{ y = v > 0 && v < 0; }
link in1.0 -> s.0
link s.0 -> y.0
)");
  InstrumentedModel im = instrument_or_die(m);
  PathConstraintSystem pcs = unroll(im, 2);
  REQUIRE(pcs.enumeration_complete);
  Executor ex(im);

  int t = pcs.target_index(0, 0, true);  // the whole decision true
  REQUIRE(t >= 0);
  SolveOutcome so = solve_target(pcs, t, ex);
  CHECK(so.status == TargetStatus::UnsatWithinBound);

  // and the false outcome plus both condition outcomes that exist are solvable
  CHECK(solve_target(pcs, pcs.target_index(0, 0, false), ex).status == TargetStatus::Solved);
  CHECK(solve_target(pcs, pcs.target_index(0, 1, true), ex).status == TargetStatus::Solved);
  CHECK(solve_target(pcs, pcs.target_index(0, 2, true), ex).status ==
        TargetStatus::UnsatWithinBound);
}

TEST_CASE("ondlc at K=6 solves the firing branch with tset 5") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  PathConstraintSystem pcs = unroll(im, 6);
  CHECK(pcs.enumeration_complete);
  CHECK(pcs.paths.size() == 4096);

  Executor ex(im);
  int t = pcs.target_index(1, 0, true);  // cnt >= tset
  REQUIRE(t >= 0);
  SolveOutcome so = solve_target(pcs, t, ex);
  REQUIRE(so.status == TargetStatus::Solved);

  // the returned case replays to a firing trace (solver already verified it,
  // but check the shape: a run of five tens and tset=5 at the tail)
  const auto& bytes = so.assignment->bytes;
  int tens = 0;
  for (int i = 0; i < 6; ++i)
    if (decode_scalar(bytes.data() + i * 4, ValueType::I32) == 10) tens++;
  CHECK(tens >= 5);
  CHECK(decode_scalar(bytes.data() + 80, ValueType::I32) == 5);
}

TEST_CASE("ondlc at the default bound stays unknown on the firing branch") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  PathConstraintSystem pcs = unroll(im, kDefaultUnrollBound);
  CHECK_FALSE(pcs.enumeration_complete);  // 4^10 outgrows the path cap
  Executor ex(im);
  SolveOutcome so = solve_target(pcs, pcs.target_index(1, 0, true), ex);
  CHECK(so.status == TargetStatus::Unknown);
}

TEST_CASE("nonlinear subexpressions mark their targets search-only") {
  ModelIR m = parse_or_die(R"(
model nl samples=2
port u in signal int32 range -100 100
port y out signal bool
block s Script in{u:int32} out{y:bool} body{ y = u * u > 100; }
link u.0 -> s.0
link s.0 -> y.0
)");
  InstrumentedModel im = instrument_or_die(m);
  PathConstraintSystem pcs = unroll(im, 2);
  int t = pcs.target_index(0, 0, true);
  REQUIRE(t >= 0);
  CHECK(pcs.targets[t].search_only);

  // search still finds it (verified by execution) or reports unknown; it
  // must never claim unsat
  Executor ex(im);
  SolveOutcome so = solve_target(pcs, t, ex);
  CHECK(so.status != TargetStatus::UnsatWithinBound);
}

TEST_CASE("solved assignments always cover their targets on replay") {
  const char* files[] = {"ondlc.ir", "oshotc.ir", "twotanks.ir", "regulator.ir", "guidance.ir"};
  for (const char* f : files) {
    CAPTURE(f);
    ModelIR m = parse_or_die(read_file(bench_path(f)));
    InstrumentedModel im = instrument_or_die(m);
    PathConstraintSystem pcs = unroll(im, kDefaultUnrollBound);
    Executor ex(im);
    Executor verify(im);
    for (size_t t = 0; t < pcs.targets.size(); ++t) {
      SolveOutcome so = solve_target(pcs, static_cast<int>(t), ex);
      if (so.status != TargetStatus::Solved) continue;
      REQUIRE(so.assignment.has_value());
      const auto& trace = verify.run(*so.assignment);
      const Target& target = pcs.targets[t];
      bool covered = false;
      for (const auto& ev : trace.evaluations[target.decision]) {
        if (target.cond_key == 0) {
          covered |= (ev.word & 1) == static_cast<uint64_t>(target.outcome);
        } else {
          covered |= (ev.mask >> target.cond_key & 1) &&
                     (ev.word >> target.cond_key & 1) == static_cast<uint64_t>(target.outcome);
        }
      }
      CHECK(covered);
    }
  }
}

TEST_CASE("symbols map every buffer element at the bound") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  InstrumentedModel im = instrument_or_die(m);
  PathConstraintSystem pcs = unroll(im, 4);
  // 4 steps of u plus the constant tset
  CHECK(pcs.symbols.size() == 5);
  int const_syms = 0;
  for (const auto& s : pcs.symbols)
    if (im.base.ports[s.port_index].kind == PortKind::Constant) const_syms++;
  CHECK(const_syms == 1);
}

TEST_CASE("unsat claims are never contradicted by random execution") {
  // sampled version of the full acceptance property
  ModelIR m = parse_or_die(R"(
model dead2 samples=3
port a in signal int32 range 0 30
port y out signal bool
block s Script in{a:int32} out{y:bool} state{k:int32=0} body{
  if (a > 10 && a < 5) { k = 1; }
  y = k == 1;
}
link a.0 -> s.0
link s.0 -> y.0
)");
  InstrumentedModel im = instrument_or_die(m);
  PathConstraintSystem pcs = unroll(im, 3);
  REQUIRE(pcs.enumeration_complete);
  Executor ex(im);

  std::vector<int> unsat_targets;
  for (size_t t = 0; t < pcs.targets.size(); ++t)
    if (solve_target(pcs, static_cast<int>(t), ex).status == TargetStatus::UnsatWithinBound)
      unsat_targets.push_back(static_cast<int>(t));
  REQUIRE_FALSE(unsat_targets.empty());

  Rng rng(8);
  for (int i = 0; i < 20000; ++i) {
    TestCase tc;
    tc.bytes.resize(ex.layout().total_bytes);
    for (auto& b : tc.bytes) b = static_cast<uint8_t>(rng.next());
    const auto& trace = ex.run(tc);
    for (int t : unsat_targets) {
      const Target& target = pcs.targets[t];
      for (const auto& ev : trace.evaluations[target.decision]) {
        if (target.cond_key == 0) {
          CHECK((ev.word & 1) != static_cast<uint64_t>(target.outcome));
        } else if (ev.mask >> target.cond_key & 1) {
          CHECK((ev.word >> target.cond_key & 1) != static_cast<uint64_t>(target.outcome));
        }
      }
    }
  }
}
