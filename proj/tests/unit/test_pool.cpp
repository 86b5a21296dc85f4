#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sigfuzz/pool.hpp"

using namespace sigfuzz;
using namespace testutil;

namespace {

// a three-decision single-condition scaffold so condition keys are 0,1,2
struct Rig {
  ModelIR model;
  InstrumentedModel im;
  Executor ex;

  Rig()
      : model(parse_or_die(R"(
model pool3 samples=1
port a in signal int32 range -100 100
port b in signal int32 range -100 100
port c in signal int32 range -100 100
port x out signal bool
port y out signal bool
port z out signal bool
block c1 RelationalOp {op=">", in1=0}
block c2 RelationalOp {op=">", in1=0}
block c3 RelationalOp {op=">", in1=0}
link a.0 -> c1.0
link b.0 -> c2.0
link c.0 -> c3.0
link c1.0 -> x.0
link c2.0 -> y.0
link c3.0 -> z.0
)")),
        im(instrument_or_die(model)),
        ex(im) {}

  TestCase tc(int32_t a, int32_t b, int32_t c) {
    TestCase t;
    t.bytes.assign(12, 0);
    encode_scalar(t.bytes.data(), ValueType::I32, a);
    encode_scalar(t.bytes.data() + 4, ValueType::I32, b);
    encode_scalar(t.bytes.data() + 8, ValueType::I32, c);
    return t;
  }
};

}  // namespace

TEST_CASE("selection weights follow the selection-count and half-flip rule") {
  Rig rig;
  SeedPool pool(rig.im);
  CumulativeCoverage cov(rig.im);

  // two seeds with identical coverage; d0 ends half-flipped (true only)
  TestCase s1 = rig.tc(5, -5, -5);
  const auto& t1 = rig.ex.run(s1);
  cov.merge_trace(t1);
  s1.meta.signature = signature(t1, rig.im);
  pool.add(s1, t1);

  TestCase s2 = rig.tc(7, -7, -7);
  ExecutionTrace t2 = rig.ex.run(s2);
  t2.evaluations[2].clear();  // pretend this one never touched d2
  s2.meta.signature = Signature{1, 2};
  pool.add(s2, t2);

  // select_times: [0], [1]; every condition half-flipped with exec_times 0
  pool.entry(1).test.meta.select_times = 1;
  auto w = pool.selection_weights(cov);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.5));
  // normalized: 2/3 vs 1/3
  CHECK(w[0] / (w[0] + w[1]) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("exec times weight half-flipped conditions down") {
  Rig rig;
  SeedPool pool(rig.im);
  CumulativeCoverage cov(rig.im);

  TestCase s1 = rig.tc(5, -5, -5);
  const auto& t1 = rig.ex.run(s1);
  cov.merge_trace(t1);
  s1.meta.signature = signature(t1, rig.im);
  pool.add(s1, t1);
  // the trace evaluated all three conditions; bump their exec counts twice
  pool.note_executed(rig.ex.run(s1));
  pool.note_executed(rig.ex.run(s1));
  CHECK(pool.exec_times(0, 0) == 2);

  // prob = 1, prob2 = 3 * 1/3, counter = 3 -> weight 1/3
  auto w = pool.selection_weights(cov);
  CHECK(w[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a case with no half-flipped conditions keeps factor one") {
  Rig rig;
  SeedPool pool(rig.im);
  CumulativeCoverage cov(rig.im);

  // cover both outcomes of every decision: nothing is half-flipped
  for (auto& tc : {rig.tc(5, 5, 5), rig.tc(-5, -5, -5)}) {
    TestCase s = tc;
    const auto& t = rig.ex.run(s);
    cov.merge_trace(t);
    s.meta.signature = signature(t, rig.im);
    pool.add(s, t);
  }
  auto w = pool.selection_weights(cov);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(1.0));
}

TEST_CASE("single seed is always selected and counts selections") {
  Rig rig;
  SeedPool pool(rig.im);
  CumulativeCoverage cov(rig.im);
  TestCase s = rig.tc(1, 1, 1);
  const auto& t = rig.ex.run(s);
  s.meta.signature = signature(t, rig.im);
  pool.add(s, t);

  Rng rng(3);
  for (int i = 0; i < 10; ++i) CHECK(pool.seed_select(rng, cov) == 0);
  CHECK(pool.entry(0).test.meta.select_times == 10);
}

TEST_CASE("identical statistics draw uniformly") {
  Rig rig;
  SeedPool pool(rig.im);
  CumulativeCoverage cov(rig.im);
  for (int i = 0; i < 4; ++i) {
    TestCase s = rig.tc(5, -5, -5);
    const auto& t = rig.ex.run(s);
    s.meta.signature = Signature{static_cast<uint64_t>(i), 0};
    pool.add(s, t);
  }
  // hold statistics fixed: selection counts reset after each draw
  Rng rng(4);
  int counts[4] = {0, 0, 0, 0};
  int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    int pick = pool.seed_select(rng, cov);
    counts[pick]++;
    pool.entry(pick).test.meta.select_times = 0;
  }
  double expect = draws / 4.0;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 3 degrees of freedom, 99.9th percentile ~ 16.27
  CHECK(chi2 < 16.27);
}

TEST_CASE("pool update acceptance rules") {
  Rig rig;
  SeedPool pool(rig.im);
  CumulativeCoverage cov(rig.im);

  TestCase parent = rig.tc(5, -5, -5);
  {
    const auto& t = rig.ex.run(parent);
    cov.merge_trace(t);
    parent.meta.signature = signature(t, rig.im);
    pool.add(parent, t);
  }

  SUBCASE("replaying the parent's exact coverage is rejected") {
    TestCase child = rig.tc(6, -6, -6);  // same outcomes
    const auto& t = rig.ex.run(child);
    CoverageDelta delta = cov.merge_trace(t);
    CHECK(delta.empty());
    CHECK_FALSE(pool_update(pool, child, t, delta, signature(t, rig.im)));
    CHECK(pool.size() == 1);
  }

  SUBCASE("new decision outcome is accepted") {
    TestCase child = rig.tc(-5, -5, -5);
    const auto& t = rig.ex.run(child);
    CoverageDelta delta = cov.merge_trace(t);
    CHECK_FALSE(delta.empty());
    CHECK(pool_update(pool, child, t, delta, signature(t, rig.im)));
    CHECK(pool.size() == 2);
    CHECK(pool.entry(1).test.meta.select_times == 0);
  }

  SUBCASE("novel signature without new coverage is accepted") {
    // first cover everything
    TestCase all = rig.tc(-9, 9, 9);
    const auto& t0 = rig.ex.run(all);
    cov.merge_trace(t0);
    all.meta.signature = signature(t0, rig.im);
    pool.add(all, t0);
    // now a child with a previously unseen combination of known outcomes
    TestCase child = rig.tc(-3, -3, 3);
    const auto& t = rig.ex.run(child);
    CoverageDelta delta = cov.merge_trace(t);
    CHECK(delta.empty());
    Signature sig = signature(t, rig.im);
    CHECK_FALSE(pool.contains(sig));
    CHECK(pool_update(pool, child, t, delta, sig));
  }

  SUBCASE("exec times grow even for rejected children") {
    uint64_t before = pool.exec_times(0, 0);
    TestCase child = rig.tc(6, -6, -6);
    const auto& t = rig.ex.run(child);
    CoverageDelta delta = cov.merge_trace(t);
    pool_update(pool, child, t, delta, signature(t, rig.im));
    CHECK(pool.exec_times(0, 0) == before + 1);
  }
}

TEST_CASE("pool signatures stay pairwise distinct") {
  Rig rig;
  SeedPool pool(rig.im);
  CumulativeCoverage cov(rig.im);
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    TestCase child = rig.tc(static_cast<int32_t>(rng.range_i64(-9, 9)),
                            static_cast<int32_t>(rng.range_i64(-9, 9)),
                            static_cast<int32_t>(rng.range_i64(-9, 9)));
    const auto& t = rig.ex.run(child);
    CoverageDelta delta = cov.merge_trace(t);
    pool_update(pool, child, t, delta, signature(t, rig.im));
  }
  std::set<Signature> sigs;
  for (size_t i = 0; i < pool.size(); ++i) {
    REQUIRE(pool.entry(static_cast<int>(i)).test.meta.signature.has_value());
    CHECK(sigs.insert(*pool.entry(static_cast<int>(i)).test.meta.signature).second);
  }
}
