#pragma once

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sigfuzz/exec.hpp"
#include "sigfuzz/instrument.hpp"
#include "sigfuzz/ir.hpp"
#include "sigfuzz/layout.hpp"
#include "sigfuzz/rng.hpp"

namespace testutil {

using namespace sigfuzz;

inline ModelIR parse_or_die(const std::string& text) {
  ParseResult r = parse_model(text);
  if (!r.ok()) {
    std::string msg = "parse failed:\n";
    for (const auto& d : r.diagnostics) msg += "  " + d.to_string() + "\n";
    throw std::runtime_error(msg);
  }
  return std::move(*r.model);
}

inline InstrumentedModel instrument_or_die(const ModelIR& m) {
  InstrumentResult r = instrument(m);
  if (!r.ok()) {
    std::string msg = "instrument failed:\n";
    for (const auto& d : r.diagnostics) msg += "  " + d.to_string() + "\n";
    throw std::runtime_error(msg);
  }
  return std::move(*r.model);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string bench_path(const std::string& name) {
  return std::string(SIGFUZZ_BENCH_DIR) + "/" + name;
}

// Independent little-endian reference decoder: plain positional arithmetic,
// no shared code with the layout module.
inline double reference_decode(const std::vector<uint8_t>& buf, size_t off, ValueType t) {
  auto byte = [&](size_t i) { return static_cast<uint64_t>(buf.at(off + i)); };
  switch (t) {
    case ValueType::Bool:
      return byte(0) != 0 ? 1.0 : 0.0;
    case ValueType::I8: {
      uint64_t v = byte(0);
      return v >= 128 ? static_cast<double>(v) - 256.0 : static_cast<double>(v);
    }
    case ValueType::I16: {
      uint64_t v = byte(0) + byte(1) * 256;
      return v >= 32768 ? static_cast<double>(v) - 65536.0 : static_cast<double>(v);
    }
    case ValueType::I32: {
      uint64_t v = byte(0) + byte(1) * 256 + byte(2) * 65536 + byte(3) * 16777216;
      return v >= 2147483648ull ? static_cast<double>(v) - 4294967296.0 : static_cast<double>(v);
    }
    case ValueType::F64: {
      uint64_t v = 0;
      for (int i = 7; i >= 0; --i) v = v * 256 + byte(static_cast<size_t>(i));
      double d;
      static_assert(sizeof(double) == 8);
      __builtin_memcpy(&d, &v, 8);
      return d;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Random Boolean expression trees over n distinct atoms (used by the MC/DC
// oracle tests). Atom i appears exactly once, in source order.
// ---------------------------------------------------------------------------

struct BoolTree {
  enum Kind { Atom, Not, And, Or } kind = Atom;
  int atom = 0;  // 1-based condition index
  std::unique_ptr<BoolTree> lhs, rhs;

  // full (non-short-circuit) functional evaluation; bit c-1 of `assignment`
  // is the value of atom c
  bool eval(uint64_t assignment) const {
    switch (kind) {
      case Atom: return assignment >> (atom - 1) & 1;
      case Not: return !lhs->eval(assignment);
      case And: return lhs->eval(assignment) && rhs->eval(assignment);
      case Or: return lhs->eval(assignment) || rhs->eval(assignment);
    }
    return false;
  }

  // short-circuit-observing evaluation: records which atoms were evaluated
  // and their values, mirroring what instrumented script execution can see
  bool eval_sc(uint64_t assignment, uint64_t* word, uint64_t* mask) const {
    switch (kind) {
      case Atom: {
        bool v = assignment >> (atom - 1) & 1;
        *word |= static_cast<uint64_t>(v) << atom;
        *mask |= 1ull << atom;
        return v;
      }
      case Not:
        return !lhs->eval_sc(assignment, word, mask);
      case And: {
        if (!lhs->eval_sc(assignment, word, mask)) return false;
        return rhs->eval_sc(assignment, word, mask);
      }
      case Or: {
        if (lhs->eval_sc(assignment, word, mask)) return true;
        return rhs->eval_sc(assignment, word, mask);
      }
    }
    return false;
  }

  std::string to_script(const std::function<std::string(int)>& atom_text) const {
    switch (kind) {
      case Atom: return atom_text(atom);
      case Not: return "!(" + lhs->to_script(atom_text) + ")";
      case And: return "(" + lhs->to_script(atom_text) + " && " + rhs->to_script(atom_text) + ")";
      case Or: return "(" + lhs->to_script(atom_text) + " || " + rhs->to_script(atom_text) + ")";
    }
    return "";
  }
};

inline std::unique_ptr<BoolTree> random_bool_tree(Rng& rng, int first_atom, int n_atoms) {
  auto node = std::make_unique<BoolTree>();
  if (n_atoms == 1) {
    if (rng.chance(0.2)) {
      node->kind = BoolTree::Not;
      node->lhs = random_bool_tree(rng, first_atom, 1);
    } else {
      node->kind = BoolTree::Atom;
      node->atom = first_atom;
    }
    return node;
  }
  if (rng.chance(0.15)) {
    node->kind = BoolTree::Not;
    node->lhs = random_bool_tree(rng, first_atom, n_atoms);
    return node;
  }
  node->kind = rng.chance(0.5) ? BoolTree::And : BoolTree::Or;
  int left = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n_atoms - 1)));
  node->lhs = random_bool_tree(rng, first_atom, left);
  node->rhs = random_bool_tree(rng, first_atom + left, n_atoms - left);
  return node;
}

// Textbook unique-cause MC/DC on a truth table: condition c is covered iff
// two assignments differing only at c flip the decision.
inline std::set<int> mcdc_truth_table_oracle(int n, const std::function<bool(uint64_t)>& f) {
  std::set<int> sat;
  for (int c = 1; c <= n; ++c) {
    for (uint64_t a = 0; a < (1ull << n); ++a) {
      uint64_t b = a ^ (1ull << (c - 1));
      if (f(a) != f(b)) {
        sat.insert(c);
        break;
      }
    }
  }
  return sat;
}

// ---------------------------------------------------------------------------
// Random script models for instrumentation-transparency checks: state vars,
// nested if/else, bounded whiles, short-circuit conditions with post-increment
// side effects, and integer division (so fault paths get exercised too).
// ---------------------------------------------------------------------------

class RandomScriptModel {
 public:
  explicit RandomScriptModel(uint64_t seed) : rng_(seed) {}

  std::string generate() {
    n_inputs_ = 2 + static_cast<int>(rng_.below(3));   // a0..a2
    n_states_ = 1 + static_cast<int>(rng_.below(3));   // s0..s2
    depth_ = 0;
    std::string body;
    int stmts = 3 + static_cast<int>(rng_.below(5));
    for (int i = 0; i < stmts; ++i) body += stmt(2);
    body += "  y = " + int_var() + ";\n";
    body += "  z = " + bool_expr(2) + ";\n";

    std::string text = "model rnd samples=" + std::to_string(4 + rng_.below(6)) + "\n";
    for (int i = 0; i < n_inputs_; ++i)
      text += "port a" + std::to_string(i) + " in signal int32 range -40 40\n";
    text += "port y out signal int32\nport z out signal bool\n";
    text += "block s Script in{";
    for (int i = 0; i < n_inputs_; ++i)
      text += (i ? ", " : "") + ("a" + std::to_string(i)) + ":int32";
    text += "} out{y:int32, z:bool} state{";
    for (int i = 0; i < n_states_; ++i) {
      if (i) text += ", ";
      text += "s" + std::to_string(i) + ":int32=" + std::to_string(rng_.range_i64(-3, 3));
    }
    text += "} body{\n" + body + "}\n";
    for (int i = 0; i < n_inputs_; ++i)
      text += "link a" + std::to_string(i) + ".0 -> s." + std::to_string(i) + "\n";
    text += "link s.0 -> y.0\nlink s.1 -> z.0\n";
    return text;
  }

 private:
  std::string int_var() {
    if (rng_.chance(0.4)) return "a" + std::to_string(rng_.below(n_inputs_));
    return "s" + std::to_string(rng_.below(n_states_));
  }

  std::string int_expr(int depth) {
    if (depth <= 0 || rng_.chance(0.35)) {
      switch (rng_.below(3)) {
        case 0: return int_var();
        case 1: return std::to_string(rng_.range_i64(-20, 20));
        default: return int_var() + "++";
      }
    }
    static const char* ops[] = {" + ", " - ", " * ", " / "};
    return "(" + int_expr(depth - 1) + ops[rng_.below(4)] + int_expr(depth - 1) + ")";
  }

  std::string atom() {
    static const char* cmp[] = {" < ", " <= ", " > ", " >= ", " == ", " != "};
    return int_expr(1) + cmp[rng_.below(6)] + int_expr(1);
  }

  std::string bool_expr(int depth) {
    if (depth <= 0 || rng_.chance(0.4)) return atom();
    if (rng_.chance(0.15)) return "!(" + bool_expr(depth - 1) + ")";
    const char* op = rng_.chance(0.5) ? " && " : " || ";
    return "(" + bool_expr(depth - 1) + op + bool_expr(depth - 1) + ")";
  }

  std::string stmt(int depth) {
    std::string pad = "  ";
    if (depth > 0 && rng_.chance(0.3)) {
      std::string s = pad + "if (" + bool_expr(2) + ") {\n" + stmt(depth - 1);
      if (rng_.chance(0.5)) s += pad + "} else {\n" + stmt(depth - 1);
      return s + pad + "}\n";
    }
    if (depth > 0 && rng_.chance(0.15)) {
      std::string i = "w" + std::to_string(loop_counter_++);
      std::string s = pad + i + " = 0;\n";
      s += pad + "while (" + i + " < " + std::to_string(1 + rng_.below(5)) + ") {\n";
      s += pad + "  " + i + " = " + i + " + 1;\n" + stmt(depth - 1) + pad + "}\n";
      return s;
    }
    std::string target = rng_.chance(0.6) ? "s" + std::to_string(rng_.below(n_states_))
                                          : "a" + std::to_string(rng_.below(n_inputs_));
    return pad + target + " = " + int_expr(2) + ";\n";
  }

  Rng rng_;
  int n_inputs_ = 2;
  int n_states_ = 1;
  int depth_ = 0;
  int loop_counter_ = 0;
};

// Bit-exact comparison of two traces: outputs, state snapshots, and fault.
inline bool traces_identical(const ExecutionTrace& a, const ExecutionTrace& b) {
  if (a.steps_executed != b.steps_executed) return false;
  if (a.fault.has_value() != b.fault.has_value()) return false;
  if (a.fault && !(*a.fault == *b.fault)) return false;
  if (a.outputs.size() != b.outputs.size()) return false;
  for (size_t p = 0; p < a.outputs.size(); ++p) {
    if (a.outputs[p].size() != b.outputs[p].size()) return false;
    for (size_t i = 0; i < a.outputs[p].size(); ++i)
      if (!a.outputs[p][i].bits_equal(b.outputs[p][i])) return false;
  }
  if (a.state_trace.size() != b.state_trace.size()) return false;
  for (size_t s = 0; s < a.state_trace.size(); ++s) {
    if (a.state_trace[s].size() != b.state_trace[s].size()) return false;
    for (size_t i = 0; i < a.state_trace[s].size(); ++i)
      if (!a.state_trace[s][i].bits_equal(b.state_trace[s][i])) return false;
  }
  return true;
}

}  // namespace testutil
