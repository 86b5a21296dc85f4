#include <string>

#include "sigfuzz/ir.hpp"

namespace sigfuzz {

namespace {

int level_of(const Expr& e) {
  // matches the parser's precedence table; primaries are highest
  if (e.kind != ExprKind::Binary) return 6;
  switch (e.bin_op) {
    case BinOp::Or: return 0;
    case BinOp::And: return 1;
    case BinOp::Eq:
    case BinOp::Ne: return 2;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 3;
    case BinOp::Add:
    case BinOp::Sub: return 4;
    case BinOp::Mul:
    case BinOp::Div: return 5;
  }
  return 6;
}

void print_expr(const Expr& e, std::string& out, int parent_level) {
  int lvl = level_of(e);
  switch (e.kind) {
    case ExprKind::IntLit:
      out += std::to_string(e.int_val);
      break;
    case ExprKind::FloatLit: {
      char buf[64];
      snprintf(buf, sizeof buf, "%.17g", e.float_val);
      out += buf;
      if (std::string(buf).find_first_of(".eE") == std::string::npos) out += ".0";
      break;
    }
    case ExprKind::BoolLit:
      out += e.bool_val ? "true" : "false";
      break;
    case ExprKind::Var:
      out += e.name;
      break;
    case ExprKind::Unary:
      out += e.un_op == UnOp::Not ? "!" : "-";
      print_expr(*e.lhs, out, 6);
      break;
    case ExprKind::PostInc:
      print_expr(*e.lhs, out, 6);
      out += "++";
      break;
    case ExprKind::Binary: {
      bool parens = lvl < parent_level;
      if (parens) out += "(";
      print_expr(*e.lhs, out, lvl);
      out += " ";
      out += binop_name(e.bin_op);
      out += " ";
      print_expr(*e.rhs, out, lvl + 1);  // left-associative
      if (parens) out += ")";
      break;
    }
    case ExprKind::Record:
      print_expr(*e.lhs, out, parent_level);
      break;
  }
}

void print_stmts(const std::vector<StmtPtr>& body, std::string& out, int indent);

void print_stmt(const Stmt& s, std::string& out, int indent) {
  std::string pad(indent, ' ');
  switch (s.kind) {
    case StmtKind::Assign:
      out += pad + s.target + " = ";
      print_expr(*s.expr, out, 0);
      out += ";\n";
      break;
    case StmtKind::ExprStmt:
      out += pad;
      print_expr(*s.expr, out, 0);
      out += ";\n";
      break;
    case StmtKind::If:
      out += pad + "if (";
      print_expr(*s.expr, out, 0);
      out += ") {\n";
      print_stmts(s.then_body, out, indent + 2);
      out += pad + "}";
      if (!s.else_body.empty()) {
        out += " else {\n";
        print_stmts(s.else_body, out, indent + 2);
        out += pad + "}";
      }
      out += "\n";
      break;
    case StmtKind::While:
      out += pad + "while (";
      print_expr(*s.expr, out, 0);
      out += ") {\n";
      print_stmts(s.then_body, out, indent + 2);
      out += pad + "}\n";
      break;
  }
}

void print_stmts(const std::vector<StmtPtr>& body, std::string& out, int indent) {
  for (const auto& s : body) print_stmt(*s, out, indent);
}

std::string type_str(ValueType t, int width) {
  std::string s = type_name(t);
  if (width != 1) s += "x" + std::to_string(width);
  return s;
}

std::string num_str(double v) {
  // integers print without a fraction; everything else round-trips exactly
  if (v == static_cast<int64_t>(v) && v >= -9e15 && v <= 9e15)
    return std::to_string(static_cast<int64_t>(v));
  char buf[64];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string print_model(const ModelIR& m) {
  std::string out;
  out += "model " + m.name + " samples=" + std::to_string(m.sample_count) + "\n";
  for (const auto& p : m.ports) {
    out += "port " + p.id;
    out += p.direction == PortDirection::In ? " in" : " out";
    out += p.kind == PortKind::Signal ? " signal " : " const ";
    out += type_str(p.value_type, p.width);
    if (p.range) out += " range " + num_str(p.range->first) + " " + num_str(p.range->second);
    if (!p.candidates.empty()) {
      out += " candidates ";
      for (size_t i = 0; i < p.candidates.size(); ++i) {
        if (i) out += ",";
        out += num_str(p.candidates[i]);
      }
    }
    out += "\n";
  }
  for (const auto& b : m.blocks) {
    out += "block " + b.id + " " + block_kind_name(b.kind);
    if (b.kind == BlockKind::Script) {
      if (!b.inputs.empty()) {
        out += " in{";
        for (size_t i = 0; i < b.inputs.size(); ++i) {
          if (i) out += ", ";
          out += b.inputs[i].name + ":" + type_name(b.inputs[i].type);
        }
        out += "}";
      }
      if (!b.outputs.empty()) {
        out += " out{";
        for (size_t i = 0; i < b.outputs.size(); ++i) {
          if (i) out += ", ";
          out += b.outputs[i].name + ":" + type_name(b.outputs[i].type);
        }
        out += "}";
      }
      if (!b.state_vars.empty()) {
        out += " state{";
        for (size_t i = 0; i < b.state_vars.size(); ++i) {
          if (i) out += ", ";
          out += b.state_vars[i].name + ":" + type_name(b.state_vars[i].type) + "=" +
                 b.state_vars[i].init.to_string();
        }
        out += "}";
      }
      out += " body{\n";
      print_stmts(b.body, out, 2);
      out += "}\n";
    } else if (!b.params.empty()) {
      out += " {";
      bool first = true;
      for (const auto& [k, v] : b.params) {
        if (!first) out += ", ";
        first = false;
        out += k + "=" + v;
      }
      out += "}\n";
    } else {
      out += "\n";
    }
  }
  for (const auto& l : m.links) {
    out += "link " + l.src.node + "." + std::to_string(l.src.index) + " -> " + l.dst.node + "." +
           std::to_string(l.dst.index) + "\n";
  }
  return out;
}

}  // namespace sigfuzz
