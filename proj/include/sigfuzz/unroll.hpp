#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sigfuzz/exec.hpp"
#include "sigfuzz/instrument.hpp"
#include "sigfuzz/layout.hpp"

namespace sigfuzz {

// One solver variable per (input port, time step, channel); constant ports
// contribute one variable regardless of step.
struct SymbolInfo {
  int port_index = 0;
  int entry = 0;  // layout entry
  int step = 0;   // 0 for constant ports
  int channel = 0;
  ValueType type = ValueType::I32;
  double lo = 0, hi = 0;  // declared range intersected with the type range
};

// c0 + sum(coeff * symbol). Nonlinear subexpressions collapse to opaque.
struct LinExpr {
  double c0 = 0;
  std::vector<std::pair<int, double>> terms;  // sorted by symbol index
  bool opaque = false;

  bool is_const() const { return terms.empty() && !opaque; }
  static LinExpr constant(double v) {
    LinExpr e;
    e.c0 = v;
    return e;
  }
  static LinExpr symbol(int s) {
    LinExpr e;
    e.terms.push_back({s, 1.0});
    return e;
  }
  static LinExpr make_opaque() {
    LinExpr e;
    e.opaque = true;
    return e;
  }
};

LinExpr lin_add(const LinExpr& a, const LinExpr& b);
LinExpr lin_sub(const LinExpr& a, const LinExpr& b);
LinExpr lin_scale(const LinExpr& a, double k);

enum class CmpOp : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

// lhs OP 0
struct Constraint {
  LinExpr lhs;
  CmpOp op = CmpOp::Eq;
  bool is_int = true;  // all symbols integral and coefficients integral
};

// One target occurrence along a path. Reaching it only needs the constraints
// recorded up to that point, so solving works on the prefix; anything past it
// cannot block the occurrence.
struct Realization {
  int target = 0;
  int step = 0;
  int prefix_len = 0;       // constraints[0..prefix_len) guard this occurrence
  bool opaque_before = false;  // an unconstrained (opaque) branch precedes it
};

struct PathInfo {
  std::vector<Constraint> constraints;
  std::vector<Realization> realized;
  bool opaque = false;      // carries an opaque branch somewhere
  bool has_float = false;
  bool faulted = false;
  bool truncated = false;   // abandoned at a depth or loop bound
};

enum class TargetStatus : uint8_t { Unsolved, Solved, UnsatWithinBound, Unknown };

struct Target {
  int decision = 0;
  int cond_key = 0;  // 0 = the decision itself / single condition
  bool outcome = false;
  int first_step = -1;     // earliest occurrence across enumerated paths
  bool search_only = false;  // only reachable through opaque paths
  TargetStatus status = TargetStatus::Unsolved;
};

struct PathConstraintSystem {
  const InstrumentedModel* im = nullptr;
  BufferLayout layout;
  int unroll_bound = 0;
  std::vector<SymbolInfo> symbols;
  std::vector<Target> targets;
  std::vector<PathInfo> paths;
  bool enumeration_complete = true;  // false once the path cap or depth cap hit
  int paths_enumerated = 0;

  int target_index(int decision, int cond_key, bool outcome) const;
};

inline constexpr int kDefaultPathCap = 10000;
inline constexpr int kDefaultUnrollBound = 10;

// Unrolls the model K steps, splitting true-first on every symbolic condition
// occurrence, depth-first, up to the path cap. Decision and condition
// occurrences become targets in both outcomes; targets only reachable through
// nonlinear (opaque) constraints are flagged search-only.
PathConstraintSystem unroll(const InstrumentedModel& im, int K, int path_cap = kDefaultPathCap);

struct SolveOutcome {
  TargetStatus status = TargetStatus::Unknown;
  std::optional<TestCase> assignment;  // present iff Solved; verified by re-execution
};

// Attempts one target: interval propagation plus bounded value search over
// the paths that realize it. A Solved result is always backed by an actual
// execution that covered the target; UnsatWithinBound is claimed only from
// complete enumeration with integer-exact emptiness proofs on every
// realizing path.
SolveOutcome solve_target(const PathConstraintSystem& pcs, int target_index, Executor& executor);

}  // namespace sigfuzz
