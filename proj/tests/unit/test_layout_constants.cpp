#include <doctest.h>

#include "helpers.hpp"
#include "sigfuzz/constants.hpp"

using namespace sigfuzz;
using namespace testutil;

TEST_CASE("single int32 signal port layout") {
  ModelIR m = parse_or_die(R"(
model one samples=20
port u in signal int32
port y out signal int32
link u.0 -> y.0
)");
  BufferLayout l = layout_test_buffer(m);
  CHECK(l.total_bytes == 80);
  REQUIRE(l.entries.size() == 1);
  CHECK(l.entries[0].offset == 0);
  CHECK(l.entries[0].bytes_per_elem == 4);
  CHECK(l.entries[0].elem_count == 20);
}

TEST_CASE("ondlc layout: 20-step signal plus one constant") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  BufferLayout l = layout_test_buffer(m);
  CHECK(l.total_bytes == 84);
  const LayoutEntry* u = l.find("u");
  const LayoutEntry* tset = l.find("tset");
  REQUIRE(u != nullptr);
  REQUIRE(tset != nullptr);
  CHECK(u->offset == 0);
  CHECK(u->elem_count == 20);
  CHECK(tset->offset == 80);
  CHECK(tset->elem_count == 1);
}

TEST_CASE("zero input ports yields the empty layout") {
  ModelIR m = parse_or_die(R"(
model none samples=9
port y out signal int32
block k Constant {value=3}
link k.0 -> y.0
)");
  BufferLayout l = layout_test_buffer(m);
  CHECK(l.total_bytes == 0);
  CHECK(l.entries.empty());
}

TEST_CASE("layout tiles the buffer with no gaps, deterministically") {
  const char* files[] = {"ondlc.ir", "oshotc.ir", "twotanks.ir", "regulator.ir", "guidance.ir"};
  for (const char* f : files) {
    CAPTURE(f);
    ModelIR m = parse_or_die(read_file(bench_path(f)));
    BufferLayout a = layout_test_buffer(m);
    BufferLayout b = layout_test_buffer(m);
    REQUIRE(a.entries.size() == b.entries.size());
    size_t expect = 0;
    size_t sum = 0;
    for (size_t i = 0; i < a.entries.size(); ++i) {
      CHECK(a.entries[i].offset == expect);          // gap-free, sorted
      CHECK(a.entries[i].offset == b.entries[i].offset);
      expect += a.entries[i].byte_size();
      sum += a.entries[i].byte_size();
    }
    CHECK(sum == a.total_bytes);
  }
}

TEST_CASE("width multiplies element size") {
  ModelIR m = parse_or_die(R"(
model wide samples=5
port v in signal int16x3
port y out signal int16
link v.1 -> y.0
)");
  BufferLayout l = layout_test_buffer(m);
  CHECK(l.entries[0].bytes_per_elem == 6);
  CHECK(l.total_bytes == 30);
  CHECK(l.scalar_slot_count() == 15);
}

TEST_CASE("scalar slots map back to byte offsets") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  BufferLayout l = layout_test_buffer(m);
  CHECK(l.scalar_slot_count() == 21);
  auto s0 = l.scalar_slot(3);
  CHECK(l.slot_byte_offset(s0) == 12);   // u element 3
  auto s1 = l.scalar_slot(20);
  CHECK(l.slot_byte_offset(s1) == 80);  // tset
}

// --- constant mining --------------------------------------------------------

TEST_CASE("ondlc mined constants include literals and neighbors") {
  ModelIR m = parse_or_die(read_file(bench_path("ondlc.ir")));
  ConstantDictionary d = mine_constants(m);
  const auto& ints = d.ints(ValueType::I32);
  for (int64_t v : {0, 1, 10, -1, 2, 9, 11}) {
    CAPTURE(v);
    CHECK(ints.count(v) == 1);
  }
}

TEST_CASE("model with no literals mines nothing") {
  ModelIR m = parse_or_die(R"(
model empty samples=2
port a in signal int32
port y out signal int32
link a.0 -> y.0
)");
  ConstantDictionary d = mine_constants(m);
  CHECK(d.empty());
}

TEST_CASE("saturate bounds are mined with neighbors") {
  ModelIR m = parse_or_die(R"(
model sat samples=2
port a in signal int32
port y out signal int32
block s Saturate {lo=-5, hi=5}
link a.0 -> s.0
link s.0 -> y.0
)");
  ConstantDictionary d = mine_constants(m);
  const auto& ints = d.ints(ValueType::I32);
  for (int64_t v : {-5, 5, -6, -4, 4, 6}) {
    CAPTURE(v);
    CHECK(ints.count(v) == 1);
  }
}

TEST_CASE("range endpoints and candidates are mined per port type") {
  ModelIR m = parse_or_die(R"(
model pr samples=2
port a in signal int16 range -100 100
port k in const int8 candidates 3,7
port y out signal int16
link a.0 -> y.0
)");
  ConstantDictionary d = mine_constants(m);
  CHECK(d.ints(ValueType::I16).count(-100) == 1);
  CHECK(d.ints(ValueType::I16).count(101) == 1);
  CHECK(d.ints(ValueType::I8).count(3) == 1);
  CHECK(d.ints(ValueType::I8).count(8) == 1);
}

TEST_CASE("values_for filters by representability") {
  ModelIR m = parse_or_die(R"(
model big samples=2
port a in signal int8
port y out signal int32
block g Gain {gain=1000}
link a.0 -> g.0
link g.0 -> y.0
)");
  ConstantDictionary d = mine_constants(m);
  auto i8 = d.values_for(ValueType::I8);
  for (double v : i8) CHECK(v <= 127.0);
  auto i32 = d.values_for(ValueType::I32);
  bool has1000 = false;
  for (double v : i32) has1000 |= v == 1000.0;
  CHECK(has1000);
}
