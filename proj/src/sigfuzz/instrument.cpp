#include "sigfuzz/instrument.hpp"

namespace sigfuzz {

namespace {

constexpr int kMaxConditions = 63;  // condition bits live at 1..63, bit 0 is the decision

bool is_bool_operator(const Expr& e) {
  if (e.kind == ExprKind::Unary) return e.un_op == UnOp::Not;
  if (e.kind != ExprKind::Binary) return false;
  if (e.bin_op == BinOp::And || e.bin_op == BinOp::Or) return true;
  if ((e.bin_op == BinOp::Eq || e.bin_op == BinOp::Ne) && e.lhs->type == ValueType::Bool)
    return true;
  return false;
}

// Leaf Boolean atoms of a decision, in source order: relational comparisons
// and bool variable references. Boolean operators (&&, ||, !, bool ==/!=)
// are structure, not conditions.
void collect_atoms(Expr& e, std::vector<Expr*>& atoms) {
  if (is_bool_operator(e)) {
    if (e.lhs) collect_atoms(*e.lhs, atoms);
    if (e.rhs) collect_atoms(*e.rhs, atoms);
    return;
  }
  atoms.push_back(&e);
}

ExprPtr wrap_record(ExprPtr inner, int decision_id, int cond_index, bool top) {
  auto r = std::make_unique<Expr>();
  r->kind = ExprKind::Record;
  r->pos = inner->pos;
  r->type = ValueType::Bool;
  r->decision_id = decision_id;
  r->cond_index = cond_index;
  r->is_decision_top = top;
  r->lhs = std::move(inner);
  return r;
}

struct Rewriter {
  InstrumentedModel& im;
  std::vector<Diagnostic>& diags;
  const Block* current_block = nullptr;
  int current_block_index = 0;

  std::string snippet(const Expr& e) {
    // short label for reports; full source positions are kept anyway
    switch (e.kind) {
      case ExprKind::Var: return e.name;
      case ExprKind::Binary: {
        std::string l = e.lhs ? snippet(*e.lhs) : "";
        std::string r = e.rhs ? snippet(*e.rhs) : "";
        return l + " " + binop_name(e.bin_op) + " " + r;
      }
      case ExprKind::Unary: return std::string("!") + (e.lhs ? snippet(*e.lhs) : "");
      case ExprKind::PostInc: return (e.lhs ? snippet(*e.lhs) : "") + "++";
      case ExprKind::IntLit: return std::to_string(e.int_val);
      default: return "...";
    }
  }

  // Rewrites the decision rooted at *root in place.
  void rewrite_decision(ExprPtr& root) {
    std::vector<Expr*> atoms;
    collect_atoms(*root, atoms);
    if (atoms.empty()) return;  // constant-only expressions are not decisions
    int id = static_cast<int>(im.decisions.size());
    DecisionInfo info;
    info.id = id;
    info.block_id = current_block->id;
    info.block_index = current_block_index;
    info.condition_count = static_cast<int>(atoms.size());
    info.origin = DecisionOrigin::Script;
    info.pos = root->pos;
    info.label = snippet(*root);
    if (info.condition_count > kMaxConditions) {
      diags.push_back({root->pos, "decision in block '" + current_block->id + "' has " +
                                      std::to_string(info.condition_count) +
                                      " conditions; at most 63 fit a coverage word"});
      return;
    }
    if (atoms.size() > 1) {
      // wrap each atom in place; atoms vector holds pointers into the tree,
      // so rewrite bottom-up via the owning ExprPtr found by re-walking
      int next_index = 1;
      wrap_atoms(root, next_index);
    }
    root = wrap_record(std::move(root), id, 0, true);
    im.decisions.push_back(std::move(info));
  }

  // Walks the Boolean structure and wraps every leaf atom with its 1-based
  // condition index, preserving source order.
  void wrap_atoms(ExprPtr& e, int& next_index) {
    if (is_bool_operator(*e)) {
      if (e->lhs) wrap_atoms(e->lhs, next_index);
      if (e->rhs) wrap_atoms(e->rhs, next_index);
      return;
    }
    int dec = static_cast<int>(im.decisions.size());
    e = wrap_record(std::move(e), dec, next_index++, false);
  }

  void rewrite_stmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign:
        if (s.expr->type == ValueType::Bool && s.expr->kind != ExprKind::BoolLit)
          rewrite_decision(s.expr);
        break;
      case StmtKind::If:
      case StmtKind::While:
        rewrite_decision(s.expr);
        for (auto& st : s.then_body) rewrite_stmt(*st);
        for (auto& st : s.else_body) rewrite_stmt(*st);
        break;
      case StmtKind::ExprStmt:
        if (s.expr->type == ValueType::Bool && s.expr->kind != ExprKind::BoolLit)
          rewrite_decision(s.expr);
        break;
    }
  }
};

}  // namespace

InstrumentResult instrument(const ModelIR& model) {
  InstrumentResult res;
  InstrumentedModel im;
  im.base = model.clone();
  im.unit_count = static_cast<int>(model.blocks.size());
  im.block_decision.assign(model.blocks.size(), -1);

  Rewriter rw{im, res.diagnostics};
  for (size_t bi = 0; bi < im.base.blocks.size(); ++bi) {
    Block& b = im.base.blocks[bi];
    rw.current_block = &b;
    rw.current_block_index = static_cast<int>(bi);
    switch (b.kind) {
      case BlockKind::Script:
        for (auto& s : b.body) rw.rewrite_stmt(*s);
        break;
      case BlockKind::RelationalOp: {
        DecisionInfo info;
        info.id = static_cast<int>(im.decisions.size());
        info.block_id = b.id;
        info.block_index = static_cast<int>(bi);
        info.condition_count = 1;
        info.origin = DecisionOrigin::RelationalBlock;
        info.pos = b.pos;
        info.label = b.id;
        im.block_decision[bi] = info.id;
        im.decisions.push_back(std::move(info));
        break;
      }
      case BlockKind::LogicOp: {
        DecisionInfo info;
        info.id = static_cast<int>(im.decisions.size());
        info.block_id = b.id;
        info.block_index = static_cast<int>(bi);
        info.condition_count = b.logic_op == LogicOpKind::Not ? 1 : b.input_count;
        info.origin = DecisionOrigin::LogicBlock;
        info.pos = b.pos;
        info.label = b.id;
        if (info.condition_count > kMaxConditions) {
          res.diagnostics.push_back(
              {b.pos, "LogicOp '" + b.id + "' has more than 63 conditions"});
          break;
        }
        im.block_decision[bi] = info.id;
        im.decisions.push_back(std::move(info));
        break;
      }
      case BlockKind::Switch: {
        DecisionInfo info;
        info.id = static_cast<int>(im.decisions.size());
        info.block_id = b.id;
        info.block_index = static_cast<int>(bi);
        info.condition_count = 1;
        info.origin = DecisionOrigin::SwitchPred;
        info.pos = b.pos;
        info.label = b.id;
        im.block_decision[bi] = info.id;
        im.decisions.push_back(std::move(info));
        break;
      }
      default:
        break;
    }
  }
  if (!res.diagnostics.empty()) return res;

  im.cond_base.resize(im.decisions.size());
  int base = 0;
  for (size_t d = 0; d < im.decisions.size(); ++d) {
    im.cond_base[d] = base;
    base += im.decisions[d].cond_key_count();
  }
  im.total_cond_keys = base;

  res.model = std::move(im);
  return res;
}

}  // namespace sigfuzz
