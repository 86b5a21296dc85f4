#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sigfuzz/value.hpp"

namespace sigfuzz {

struct SourcePos {
  int line = 0;  // 1-based; 0 = unknown
  int col = 0;
};

struct Diagnostic {
  SourcePos pos;
  std::string message;
  std::string to_string() const;
};

enum class PortDirection : uint8_t { In, Out };
enum class PortKind : uint8_t { Signal, Constant };

struct PortDecl {
  std::string id;
  PortDirection direction = PortDirection::In;
  PortKind kind = PortKind::Signal;
  ValueType value_type = ValueType::I32;
  int width = 1;
  std::optional<std::pair<double, double>> range;  // in value_type units
  std::vector<double> candidates;                  // constant ports only
  SourcePos pos;

  bool has_range() const { return range.has_value(); }
  double range_min() const { return range ? range->first : static_cast<double>(type_min(value_type)); }
  double range_max() const { return range ? range->second : static_cast<double>(type_max(value_type)); }
};

// ---------------------------------------------------------------------------
// Script AST
// ---------------------------------------------------------------------------

enum class BinOp : uint8_t { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp : uint8_t { Not, Neg };

inline bool is_relational(BinOp op) {
  return op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt || op == BinOp::Ge ||
         op == BinOp::Eq || op == BinOp::Ne;
}
inline bool is_arith(BinOp op) {
  return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div;
}

const char* binop_name(BinOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class ExprKind : uint8_t {
  IntLit,
  FloatLit,
  BoolLit,
  Var,
  Unary,
  Binary,
  PostInc,
  Record,  // instrumentation wrapper, only present in instrumented models
};

// Where a script identifier resolves to. Filled in by validation.
enum class VarSlot : uint8_t { Input, Output, State, Local, Unresolved };

struct Expr {
  ExprKind kind;
  SourcePos pos;
  ValueType type = ValueType::I32;  // set by the type checker

  // literals
  int64_t int_val = 0;
  double float_val = 0.0;
  bool bool_val = false;

  // Var / PostInc
  std::string name;
  VarSlot slot = VarSlot::Unresolved;
  int slot_index = -1;

  // Unary / Binary
  UnOp un_op = UnOp::Not;
  BinOp bin_op = BinOp::Add;
  ExprPtr lhs;  // also: operand of Unary/PostInc/Record
  ExprPtr rhs;

  // Record
  int decision_id = -1;
  int cond_index = 0;
  bool is_decision_top = false;

  ExprPtr clone() const;
};

ExprPtr make_int_lit(int64_t v, SourcePos pos = {});
ExprPtr make_float_lit(double v, SourcePos pos = {});
ExprPtr make_bool_lit(bool v, SourcePos pos = {});
ExprPtr make_var(std::string name, SourcePos pos = {});
ExprPtr make_unary(UnOp op, ExprPtr operand, SourcePos pos = {});
ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {});
ExprPtr make_post_inc(ExprPtr var, SourcePos pos = {});

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class StmtKind : uint8_t { Assign, If, While, ExprStmt };

struct Stmt {
  StmtKind kind;
  SourcePos pos;

  // Assign
  std::string target;
  VarSlot target_slot = VarSlot::Unresolved;
  int target_index = -1;

  ExprPtr expr;  // assign RHS, if/while condition, or the expression statement
  std::vector<StmtPtr> then_body;
  std::vector<StmtPtr> else_body;

  StmtPtr clone() const;
};

struct ScriptPin {
  std::string name;
  ValueType type = ValueType::I32;
};

struct StateVar {
  std::string name;
  ValueType type = ValueType::I32;
  Value init;
};

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

enum class BlockKind : uint8_t {
  Constant,
  Add,
  Gain,
  UnitDelay,
  RelationalOp,
  LogicOp,
  Switch,
  Saturate,
  Script,
};

const char* block_kind_name(BlockKind k);
std::optional<BlockKind> block_kind_from(const std::string& s);

enum class RelOpKind : uint8_t { Lt, Le, Gt, Ge, Eq, Ne };
enum class LogicOpKind : uint8_t { And, Or, Not };

struct Block {
  std::string id;
  BlockKind kind = BlockKind::Constant;
  SourcePos pos;

  // Raw key=value params as written; interpreted fields below are filled in
  // during validation.
  std::map<std::string, std::string> params;

  // Interpreted params
  Value const_value;                       // Constant
  double gain = 1.0;                       // Gain
  bool gain_is_float = false;
  Value delay_init;                        // UnitDelay
  RelOpKind rel_op = RelOpKind::Lt;        // RelationalOp
  LogicOpKind logic_op = LogicOpKind::And; // LogicOp
  double sat_lo = 0.0, sat_hi = 0.0;       // Saturate
  std::string add_signs;                   // Add, e.g. "++-"; empty = all '+'

  // Constant-bound input pins: pin index -> literal value ("inK=..." params).
  std::map<int, Value> const_inputs;

  // Script
  std::vector<ScriptPin> inputs;
  std::vector<ScriptPin> outputs;
  std::vector<StateVar> state_vars;
  std::vector<ScriptPin> locals;  // inferred during validation
  std::vector<StmtPtr> body;

  // Filled in by validation.
  int input_count = 0;   // number of input pins
  int output_count = 1;  // number of output pins
  ValueType out_type = ValueType::I32;  // non-script blocks: single output type

  Block clone() const;
};

struct LinkEnd {
  std::string node;  // block id or model port id
  int index = 0;     // output pin / channel on source, input pin / channel on dest
};

struct Link {
  LinkEnd src;
  LinkEnd dst;
  SourcePos pos;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

struct ModelIR {
  std::string name;
  int sample_count = 1;
  std::vector<PortDecl> ports;
  std::vector<Block> blocks;
  std::vector<Link> links;

  // Validation artifacts (resolved indices, evaluation order). Present on any
  // model returned by parse_model / validate.
  std::vector<int> eval_order;  // block indices in dataflow order

  const PortDecl* find_port(const std::string& id) const;
  const Block* find_block(const std::string& id) const;
  int port_index(const std::string& id) const;
  int block_index(const std::string& id) const;

  std::vector<int> input_port_indices() const;
  std::vector<int> output_port_indices() const;

  ModelIR clone() const;
};

struct ParseResult {
  std::optional<ModelIR> model;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return model.has_value(); }
};

// Parse and validate IR text. On failure, `model` is empty and `diagnostics`
// explains why (with line/column positions where known).
ParseResult parse_model(const std::string& text);

// Serialize a model back to IR text. parse_model(print_model(m)) yields a
// structurally identical model.
std::string print_model(const ModelIR& model);

// Validation of an already-built model (parse_model calls this internally).
std::vector<Diagnostic> validate_model(ModelIR& model);

}  // namespace sigfuzz
