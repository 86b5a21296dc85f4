#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sigfuzz/instrument.hpp"
#include "sigfuzz/ir.hpp"
#include "sigfuzz/layout.hpp"

namespace sigfuzz {

struct Signature {
  uint64_t hi = 0;
  uint64_t lo = 0;
  bool operator==(const Signature&) const = default;
  bool operator<(const Signature& o) const { return hi != o.hi ? hi < o.hi : lo < o.lo; }
  std::string hex() const;
};

enum class SeedOrigin : uint8_t { Bmc, Nwise, Mutation, Random };
const char* origin_name(SeedOrigin o);

struct TestCaseMeta {
  int select_times = 0;
  std::optional<Signature> signature;
  SeedOrigin origin = SeedOrigin::Random;
};

// A test case is the flat byte buffer for all input ports over all time
// steps; any byte content is executable (decoding clamps to port ranges).
struct TestCase {
  std::vector<uint8_t> bytes;
  TestCaseMeta meta;
};

enum class FaultKind : uint8_t { IntDivByZero, LoopCapExceeded };
const char* fault_name(FaultKind k);

struct Fault {
  FaultKind kind;
  int step = 0;
  bool operator==(const Fault&) const = default;
};

// One decision evaluation: the coverage word (bit 0 = decision outcome,
// bit c = condition c) plus the mask of indices actually recorded, which
// distinguishes a false outcome from a short-circuited, never-evaluated one.
struct DecisionEval {
  uint64_t word = 0;
  uint64_t mask = 0;
  bool operator==(const DecisionEval&) const = default;
};

struct ExecutionTrace {
  std::vector<std::vector<DecisionEval>> evaluations;  // [decision id] -> dedup set
  std::vector<std::vector<Value>> outputs;  // [out port ordinal][step * width + ch]
  std::vector<uint8_t> unit_hits;           // [block index] -> executed this run
  std::optional<Fault> fault;
  int steps_executed = 0;

  // populated only when capture_states was requested
  std::vector<std::vector<Value>> state_trace;  // [step] -> state snapshot
};

struct BoundInputs {
  bool ok = false;
  std::string error;
  // per layout entry: decoded, range-clamped scalars;
  // signal ports: [step * width + ch], const ports: [ch]
  std::vector<std::vector<double>> streams;
};

// Little-endian decode of a test case against a layout, with range clamping.
BoundInputs bind_inputs(const TestCase& test, const BufferLayout& layout,
                        const ModelIR& model);

// Reusable interpreter for one model. Not thread-safe; give each worker its
// own instance. The model itself is shared read-only.
class Executor {
 public:
  // Instrumented execution: collects decision evaluations and unit hits.
  explicit Executor(const InstrumentedModel& im);
  // Uninstrumented execution: same semantics, no coverage collection.
  explicit Executor(const ModelIR& model);
  ~Executor();
  Executor(Executor&&) noexcept;

  const BufferLayout& layout() const;

  // Runs sample_count steps; on a fault the partial trace is retained.
  // The returned reference is owned by the executor and valid until next run.
  const ExecutionTrace& run(const TestCase& test, bool capture_states = false);

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace sigfuzz
