#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sigfuzz/ir.hpp"

namespace sigfuzz {

enum class DecisionOrigin : uint8_t { Script, RelationalBlock, LogicBlock, SwitchPred };

// A decision is a top-level Boolean expression; its leaf Boolean atoms are the
// conditions. Single-atom decisions record at index 0 (the atom is the
// decision); multi-atom decisions record atoms at 1..n and the decision at 0.
struct DecisionInfo {
  int id = 0;
  std::string block_id;
  int block_index = 0;
  int condition_count = 1;  // leaf atoms
  DecisionOrigin origin = DecisionOrigin::Script;
  SourcePos pos;
  std::string label;

  bool single() const { return condition_count == 1; }
  // condition keys used in coverage bookkeeping: {0} for single-atom
  // decisions, {1..n} otherwise
  int cond_key_count() const { return single() ? 1 : condition_count; }
  int cond_key(int i) const { return single() ? 0 : i + 1; }
};

struct InstrumentedModel {
  ModelIR base;  // rewritten copy; evaluation behavior is unchanged
  std::vector<DecisionInfo> decisions;
  std::vector<int> block_decision;  // block index -> decision id, -1 if none
  int unit_count = 0;               // model units = blocks

  int decision_count() const { return static_cast<int>(decisions.size()); }

  // flat indexing for per-condition tables: cond_base[d] .. +cond_key_count
  std::vector<int> cond_base;
  int total_cond_keys = 0;
  int cond_flat_index(int decision_id, int cond_key) const {
    const auto& d = decisions[decision_id];
    return cond_base[decision_id] + (d.single() ? 0 : cond_key - 1);
  }
};

struct InstrumentResult {
  std::optional<InstrumentedModel> model;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return model.has_value(); }
};

// Wraps every Boolean expression in script bodies and every Boolean-producing
// block (RelationalOp, LogicOp, Switch predicate) with coverage recording.
// Short-circuit order and side effects are preserved. Fails when a decision
// has more conditions than a coverage word can hold (63).
InstrumentResult instrument(const ModelIR& model);

}  // namespace sigfuzz
