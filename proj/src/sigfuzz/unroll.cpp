#include "sigfuzz/unroll.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace sigfuzz {

LinExpr lin_add(const LinExpr& a, const LinExpr& b) {
  if (a.opaque || b.opaque) return LinExpr::make_opaque();
  LinExpr out;
  out.c0 = a.c0 + b.c0;
  size_t i = 0, j = 0;
  while (i < a.terms.size() || j < b.terms.size()) {
    if (j >= b.terms.size() || (i < a.terms.size() && a.terms[i].first < b.terms[j].first)) {
      out.terms.push_back(a.terms[i++]);
    } else if (i >= a.terms.size() || b.terms[j].first < a.terms[i].first) {
      out.terms.push_back(b.terms[j++]);
    } else {
      double c = a.terms[i].second + b.terms[j].second;
      if (c != 0) out.terms.push_back({a.terms[i].first, c});
      ++i;
      ++j;
    }
  }
  return out;
}

LinExpr lin_sub(const LinExpr& a, const LinExpr& b) { return lin_add(a, lin_scale(b, -1.0)); }

LinExpr lin_scale(const LinExpr& a, double k) {
  if (a.opaque) return LinExpr::make_opaque();
  LinExpr out;
  out.c0 = a.c0 * k;
  if (k != 0)
    for (auto [s, c] : a.terms) out.terms.push_back({s, c * k});
  return out;
}

int PathConstraintSystem::target_index(int decision, int cond_key, bool outcome) const {
  for (size_t i = 0; i < targets.size(); ++i)
    if (targets[i].decision == decision && targets[i].cond_key == cond_key &&
        targets[i].outcome == outcome)
      return static_cast<int>(i);
  return -1;
}

namespace {

constexpr int kDepthCap = 2048;
constexpr int kSymWhileCap = 64;

// Symbolic value: numbers are linear expressions (constants included);
// booleans are always constant along a path because conditions split.
struct SVal {
  ValueType type = ValueType::I32;
  LinExpr lin;

  bool is_const() const { return lin.is_const(); }
  double cval() const { return lin.c0; }
  bool cbool() const { return lin.c0 != 0; }
  static SVal constant(ValueType t, double v) { return SVal{t, LinExpr::constant(v)}; }
  static SVal of_value(const Value& v) {
    return constant(v.type, v.type == ValueType::F64 ? v.f : static_cast<double>(v.i));
  }
};

struct Choice {
  int arity = 2;
  int value = 0;
};

struct StopRun {};   // path abandoned (depth/loop bound)
struct FaultStop {}; // concrete fault along the path: path ends here

struct SymMachine {
  const InstrumentedModel& im;
  const ModelIR& m;
  const BufferLayout& layout;
  int K;

  // symbol table
  std::vector<SymbolInfo> symbols;
  // (entry, step, channel) -> symbol
  std::map<std::tuple<int, int, int>, int> symbol_of;

  explicit SymMachine(const InstrumentedModel& im_, const BufferLayout& lay, int k)
      : im(im_), m(im_.base), layout(lay), K(k) {
    for (size_t ei = 0; ei < layout.entries.size(); ++ei) {
      const auto& e = layout.entries[ei];
      const auto& port = m.ports[e.port_index];
      int steps = e.elem_count == 1 ? 1 : K;
      for (int st = 0; st < steps; ++st) {
        for (int ch = 0; ch < e.width; ++ch) {
          SymbolInfo s;
          s.port_index = e.port_index;
          s.entry = static_cast<int>(ei);
          s.step = st;
          s.channel = ch;
          s.type = e.value_type;
          double tlo = e.value_type == ValueType::F64 ? -1e12 : static_cast<double>(type_min(e.value_type));
          double thi = e.value_type == ValueType::F64 ? 1e12 : static_cast<double>(type_max(e.value_type));
          s.lo = std::max(tlo, port.range_min());
          s.hi = std::min(thi, port.range_max());
          symbol_of[{static_cast<int>(ei), st, ch}] = static_cast<int>(symbols.size());
          symbols.push_back(s);
        }
      }
    }
  }
};

struct SymRun {
  SymMachine& M;
  std::vector<Choice>& choices;
  size_t choice_pos = 0;
  bool extended = false;

  // per-run machine state
  std::vector<SVal> block_out;
  std::vector<int> out_base;
  std::vector<SVal> delay_state;
  std::vector<int> delay_index;
  std::vector<SVal> script_in, script_out, script_state, script_local;
  struct Store {
    int in_off, out_off, state_off, local_off;
  };
  std::vector<Store> store;

  // leaf products
  std::vector<Constraint> constraints;
  std::vector<Realization> realized;
  bool opaque = false;
  bool has_float = false;
  bool faulted = false;
  bool truncated = false;

  // occurrence register callback: target identity is (d, key, outcome)
  std::map<std::tuple<int, int, bool>, int>& target_of;
  std::vector<Target>& targets;
  int cur_step = 0;

  SymRun(SymMachine& mach, std::vector<Choice>& ch,
         std::map<std::tuple<int, int, bool>, int>& tof, std::vector<Target>& tgts)
      : M(mach), choices(ch), target_of(tof), targets(tgts) {
    const ModelIR& m = M.m;
    size_t nb = m.blocks.size();
    out_base.resize(nb);
    int off = 0;
    int nin = 0, nout = 0, nstate = 0, nlocal = 0;
    delay_index.assign(nb, -1);
    store.resize(nb);
    for (size_t i = 0; i < nb; ++i) {
      out_base[i] = off;
      off += m.blocks[i].output_count;
      const Block& b = m.blocks[i];
      if (b.kind == BlockKind::UnitDelay) {
        delay_index[i] = static_cast<int>(delay_state.size());
        delay_state.push_back(SVal::of_value(b.delay_init));
      }
      if (b.kind == BlockKind::Script) {
        store[i] = {nin, nout, nstate, nlocal};
        nin += static_cast<int>(b.inputs.size());
        nout += static_cast<int>(b.outputs.size());
        nstate += static_cast<int>(b.state_vars.size());
        nlocal += static_cast<int>(b.locals.size());
      }
    }
    block_out.resize(off);
    script_in.resize(nin);
    script_out.resize(nout);
    script_state.resize(nstate);
    script_local.resize(nlocal);
    for (size_t i = 0; i < nb; ++i) {
      const Block& b = m.blocks[i];
      if (b.kind != BlockKind::Script) continue;
      for (size_t v = 0; v < b.state_vars.size(); ++v)
        script_state[store[i].state_off + v] = SVal::of_value(b.state_vars[v].init);
      for (size_t p = 0; p < b.outputs.size(); ++p)
        script_out[store[i].out_off + p] = SVal::constant(b.outputs[p].type, 0);
    }
  }

  int branch(int arity) {
    if (choice_pos < choices.size()) {
      choice_pos++;
      return choices[choice_pos - 1].value;
    }
    if (choices.size() >= kDepthCap) {
      truncated = true;
      throw StopRun{};
    }
    choices.push_back(Choice{arity, 0});
    choice_pos++;
    extended = true;
    return 0;
  }

  void add_constraint_int_flag(Constraint& c) {
    bool all_int = true;
    for (auto [s, coeff] : c.lhs.terms) {
      if (M.symbols[s].type == ValueType::F64) all_int = false;
      if (coeff != std::floor(coeff)) all_int = false;
    }
    if (c.lhs.c0 != std::floor(c.lhs.c0)) all_int = false;
    c.is_int = all_int;
    if (!all_int) has_float = true;
  }

  // Split on a symbolic comparison: expr OP 0 versus its negation.
  bool split_cmp(const LinExpr& diff, CmpOp op) {
    if (diff.opaque) {
      opaque = true;
      return branch(2) == 0;  // explore both outcomes with no constraint
    }
    bool take_true = branch(2) == 0;
    Constraint c;
    if (take_true) {
      c.lhs = diff;
      c.op = op;
    } else {
      c.lhs = diff;
      switch (op) {
        case CmpOp::Eq: c.op = CmpOp::Ne; break;
        case CmpOp::Ne: c.op = CmpOp::Eq; break;
        case CmpOp::Lt: c.op = CmpOp::Ge; break;
        case CmpOp::Le: c.op = CmpOp::Gt; break;
        case CmpOp::Gt: c.op = CmpOp::Le; break;
        case CmpOp::Ge: c.op = CmpOp::Lt; break;
      }
    }
    add_constraint_int_flag(c);
    constraints.push_back(std::move(c));
    return take_true;
  }

  static bool eval_cmp_const(double d, CmpOp op) {
    switch (op) {
      case CmpOp::Eq: return d == 0;
      case CmpOp::Ne: return d != 0;
      case CmpOp::Lt: return d < 0;
      case CmpOp::Le: return d <= 0;
      case CmpOp::Gt: return d > 0;
      case CmpOp::Ge: return d >= 0;
    }
    return false;
  }

  bool compare(const SVal& a, const SVal& b, CmpOp op) {
    LinExpr diff = lin_sub(a.lin, b.lin);
    if (diff.is_const()) return eval_cmp_const(diff.c0, op);
    return split_cmp(diff, op);
  }

  bool force_bool(const SVal& v) {
    if (v.is_const()) return v.cbool();
    // bool-typed symbol (or expression): compare against zero
    LinExpr diff = v.lin;
    if (diff.opaque) {
      opaque = true;
      return branch(2) == 0;
    }
    return split_cmp(diff, CmpOp::Ne);
  }

  void register_occurrence(int decision, int cond_key, bool outcome) {
    auto key = std::make_tuple(decision, cond_key, outcome);
    auto it = target_of.find(key);
    if (it == target_of.end()) return;
    int ti = it->second;
    if (targets[ti].first_step < 0 || cur_step < targets[ti].first_step)
      targets[ti].first_step = cur_step;
    Realization r;
    r.target = ti;
    r.step = cur_step;
    r.prefix_len = static_cast<int>(constraints.size());
    r.opaque_before = opaque;
    realized.push_back(r);
  }

  // --- symbolic expression evaluation ---------------------------------------

  SVal read_port_channel(int entry, int channel) {
    const auto& e = M.layout.entries[entry];
    int st = e.elem_count == 1 ? 0 : cur_step;
    int sym = M.symbol_of.at({entry, st, channel});
    return SVal{e.value_type, LinExpr::symbol(sym)};
  }

  struct Ctx {
    const Store& st;
    const Block& b;
  };

  SVal* var_slot(Ctx& c, VarSlot slot, int idx) {
    switch (slot) {
      case VarSlot::Input: return &script_in[c.st.in_off + idx];
      case VarSlot::Output: return &script_out[c.st.out_off + idx];
      case VarSlot::State: return &script_state[c.st.state_off + idx];
      case VarSlot::Local: return &script_local[c.st.local_off + idx];
      default: return nullptr;
    }
  }

  SVal eval(Ctx& c, const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return SVal::constant(ValueType::I32, static_cast<double>(e.int_val));
      case ExprKind::FloatLit: return SVal::constant(ValueType::F64, e.float_val);
      case ExprKind::BoolLit: return SVal::constant(ValueType::Bool, e.bool_val ? 1 : 0);
      case ExprKind::Var: return *var_slot(c, e.slot, e.slot_index);
      case ExprKind::Unary: {
        SVal v = eval(c, *e.lhs);
        if (e.un_op == UnOp::Not) {
          bool b = force_bool(v);
          return SVal::constant(ValueType::Bool, b ? 0 : 1);
        }
        return SVal{e.type, lin_scale(v.lin, -1.0)};
      }
      case ExprKind::PostInc: {
        SVal* slot = var_slot(c, e.lhs->slot, e.lhs->slot_index);
        SVal old = *slot;
        slot->lin = lin_add(slot->lin, LinExpr::constant(1));
        return old;
      }
      case ExprKind::Record: {
        bool res = force_bool(eval(c, *e.lhs));
        register_occurrence(e.decision_id, map_cond_key(e), res);
        return SVal::constant(ValueType::Bool, res ? 1 : 0);
      }
      case ExprKind::Binary:
        return eval_binary(c, e);
    }
    return SVal{};
  }

  int map_cond_key(const Expr& rec) const {
    // single-atom decisions record at index 0, which is also the cond key
    return rec.cond_index;
  }

  SVal eval_binary(Ctx& c, const Expr& e) {
    if (e.bin_op == BinOp::And) {
      if (!force_bool(eval(c, *e.lhs))) return SVal::constant(ValueType::Bool, 0);
      bool r = force_bool(eval(c, *e.rhs));
      return SVal::constant(ValueType::Bool, r ? 1 : 0);
    }
    if (e.bin_op == BinOp::Or) {
      if (force_bool(eval(c, *e.lhs))) return SVal::constant(ValueType::Bool, 1);
      bool r = force_bool(eval(c, *e.rhs));
      return SVal::constant(ValueType::Bool, r ? 1 : 0);
    }
    SVal a = eval(c, *e.lhs);
    SVal b = eval(c, *e.rhs);
    if (is_relational(e.bin_op)) {
      if (a.type == ValueType::Bool && b.type == ValueType::Bool) {
        bool x = force_bool(a), y = force_bool(b);
        bool res = e.bin_op == BinOp::Eq ? x == y : x != y;
        return SVal::constant(ValueType::Bool, res ? 1 : 0);
      }
      CmpOp op;
      switch (e.bin_op) {
        case BinOp::Lt: op = CmpOp::Lt; break;
        case BinOp::Le: op = CmpOp::Le; break;
        case BinOp::Gt: op = CmpOp::Gt; break;
        case BinOp::Ge: op = CmpOp::Ge; break;
        case BinOp::Eq: op = CmpOp::Eq; break;
        default: op = CmpOp::Ne; break;
      }
      bool res = compare(a, b, op);
      return SVal::constant(ValueType::Bool, res ? 1 : 0);
    }
    // arithmetic
    switch (e.bin_op) {
      case BinOp::Add: return SVal{e.type, lin_add(a.lin, b.lin)};
      case BinOp::Sub: return SVal{e.type, lin_sub(a.lin, b.lin)};
      case BinOp::Mul:
        if (a.is_const() && !a.lin.opaque) return SVal{e.type, lin_scale(b.lin, a.cval())};
        if (b.is_const() && !b.lin.opaque) return SVal{e.type, lin_scale(a.lin, b.cval())};
        opaque = true;
        return SVal{e.type, LinExpr::make_opaque()};
      default:  // Div
        if (a.is_const() && b.is_const()) {
          if (e.type == ValueType::F64) return SVal::constant(e.type, a.cval() / b.cval());
          if (b.cval() == 0) throw FaultStop{};
          double q = static_cast<double>(static_cast<int64_t>(a.cval()) /
                                         static_cast<int64_t>(b.cval()));
          return SVal::constant(e.type, q);
        }
        if (b.is_const() && e.type == ValueType::F64)
          return SVal{e.type, lin_scale(a.lin, 1.0 / b.cval())};
        // integer division of a symbolic value is nonlinear
        opaque = true;
        return SVal{e.type, LinExpr::make_opaque()};
    }
  }

  void exec_stmt(Ctx& c, const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign: {
        SVal v = eval(c, *s.expr);
        SVal* slot = var_slot(c, s.target_slot, s.target_index);
        ValueType t = slot->type;
        // numeric narrowing is kept linear (wrap-free ranges are the common
        // case; re-execution verifies any assignment we hand out)
        if (t != ValueType::F64 && v.type == ValueType::F64 && !v.is_const()) {
          opaque = true;
          *slot = SVal{t, LinExpr::make_opaque()};
        } else if (v.is_const()) {
          Value cv = t == ValueType::F64 ? Value::of_double(v.cval())
                                         : Value::of_int(t, Value::double_to_int(v.cval()));
          *slot = SVal::of_value(coerce(t, cv));
        } else {
          *slot = SVal{t, v.lin};
        }
        break;
      }
      case StmtKind::If: {
        bool cond = force_bool(eval(c, *s.expr));
        const auto& body = cond ? s.then_body : s.else_body;
        for (const auto& st : body) exec_stmt(c, *st);
        break;
      }
      case StmtKind::While: {
        int iters = 0;
        while (force_bool(eval(c, *s.expr))) {
          if (++iters > kSymWhileCap) {
            truncated = true;
            throw StopRun{};
          }
          for (const auto& st : s.then_body) exec_stmt(c, *st);
        }
        break;
      }
      case StmtKind::ExprStmt:
        eval(c, *s.expr);
        break;
    }
  }

  // --- block evaluation -------------------------------------------------------

  struct Source {
    enum Kind { Port, BlockOut, Const } kind = Const;
    int entry = 0, channel = 0, out_index = 0;
    Value cval;
  };
  std::vector<std::vector<Source>> inputs_of;
  std::vector<std::vector<Source>> outport_sources;

  void resolve_links() {
    const ModelIR& m = M.m;
    std::unordered_map<std::string, int> entry_of;
    for (size_t ei = 0; ei < M.layout.entries.size(); ++ei)
      entry_of[M.layout.entries[ei].port_id] = static_cast<int>(ei);
    auto resolve = [&](const LinkEnd& src) {
      Source s;
      int pi = m.port_index(src.node);
      if (pi >= 0) {
        s.kind = Source::Port;
        s.entry = entry_of.at(src.node);
        s.channel = src.index;
        return s;
      }
      int bi = m.block_index(src.node);
      s.kind = Source::BlockOut;
      s.out_index = out_base[bi] + src.index;
      return s;
    };
    inputs_of.resize(m.blocks.size());
    for (size_t i = 0; i < m.blocks.size(); ++i) {
      inputs_of[i].resize(m.blocks[i].input_count);
      for (const auto& [pin, v] : m.blocks[i].const_inputs) {
        Source s;
        s.kind = Source::Const;
        s.cval = v;
        inputs_of[i][pin] = s;
      }
    }
    for (const auto& l : m.links) {
      int dbi = m.block_index(l.dst.node);
      if (dbi >= 0) inputs_of[dbi][l.dst.index] = resolve(l.src);
    }
  }

  SVal read(const Source& s) {
    switch (s.kind) {
      case Source::Port: return read_port_channel(s.entry, s.channel);
      case Source::BlockOut: return block_out[s.out_index];
      case Source::Const: return SVal::of_value(s.cval);
    }
    return SVal{};
  }

  void eval_block(int bi) {
    const Block& b = M.m.blocks[bi];
    SVal* out = &block_out[out_base[bi]];
    const auto& ins = inputs_of[bi];
    switch (b.kind) {
      case BlockKind::Constant:
        *out = SVal::of_value(b.const_value);
        break;
      case BlockKind::UnitDelay:
        *out = delay_state[delay_index[bi]];
        break;
      case BlockKind::Add: {
        LinExpr acc = LinExpr::constant(0);
        for (size_t p = 0; p < ins.size(); ++p) {
          LinExpr v = read(ins[p]).lin;
          acc = (p < b.add_signs.size() && b.add_signs[p] == '-') ? lin_sub(acc, v)
                                                                  : lin_add(acc, v);
        }
        if (acc.opaque) opaque = true;
        *out = SVal{b.out_type, acc};
        break;
      }
      case BlockKind::Gain: {
        *out = SVal{b.out_type, lin_scale(read(ins[0]).lin, b.gain)};
        break;
      }
      case BlockKind::Saturate: {
        SVal v = read(ins[0]);
        if (v.is_const()) {
          double d = std::clamp(v.cval(), b.sat_lo, b.sat_hi);
          *out = SVal::constant(b.out_type, d);
          break;
        }
        if (v.lin.opaque) {
          opaque = true;
          *out = SVal{b.out_type, LinExpr::make_opaque()};
          break;
        }
        // piecewise linear: in-range first, then the two clamped branches
        int arm = branch(3);
        Constraint c1, c2;
        if (arm == 0) {
          c1.lhs = lin_sub(v.lin, LinExpr::constant(b.sat_lo));
          c1.op = CmpOp::Ge;
          c2.lhs = lin_sub(v.lin, LinExpr::constant(b.sat_hi));
          c2.op = CmpOp::Le;
          add_constraint_int_flag(c1);
          add_constraint_int_flag(c2);
          constraints.push_back(c1);
          constraints.push_back(c2);
          *out = SVal{b.out_type, v.lin};
        } else if (arm == 1) {
          c1.lhs = lin_sub(v.lin, LinExpr::constant(b.sat_lo));
          c1.op = CmpOp::Lt;
          add_constraint_int_flag(c1);
          constraints.push_back(c1);
          *out = SVal::constant(b.out_type, b.sat_lo);
        } else {
          c1.lhs = lin_sub(v.lin, LinExpr::constant(b.sat_hi));
          c1.op = CmpOp::Gt;
          add_constraint_int_flag(c1);
          constraints.push_back(c1);
          *out = SVal::constant(b.out_type, b.sat_hi);
        }
        break;
      }
      case BlockKind::RelationalOp: {
        SVal a = read(ins[0]);
        SVal c2 = read(ins[1]);
        CmpOp op;
        switch (b.rel_op) {
          case RelOpKind::Lt: op = CmpOp::Lt; break;
          case RelOpKind::Le: op = CmpOp::Le; break;
          case RelOpKind::Gt: op = CmpOp::Gt; break;
          case RelOpKind::Ge: op = CmpOp::Ge; break;
          case RelOpKind::Eq: op = CmpOp::Eq; break;
          default: op = CmpOp::Ne; break;
        }
        bool res = compare(a, c2, op);
        register_occurrence(M.im.block_decision[bi], 0, res);
        *out = SVal::constant(ValueType::Bool, res ? 1 : 0);
        break;
      }
      case BlockKind::LogicOp: {
        int d = M.im.block_decision[bi];
        if (b.logic_op == LogicOpKind::Not) {
          bool v = force_bool(read(ins[0]));
          register_occurrence(d, 0, !v);
          *out = SVal::constant(ValueType::Bool, !v ? 1 : 0);
        } else {
          bool acc = b.logic_op == LogicOpKind::And;
          for (size_t p = 0; p < ins.size(); ++p) {
            bool v = force_bool(read(ins[p]));
            register_occurrence(d, static_cast<int>(p) + 1, v);
            acc = b.logic_op == LogicOpKind::And ? (acc && v) : (acc || v);
          }
          register_occurrence(d, 0, acc);
          *out = SVal::constant(ValueType::Bool, acc ? 1 : 0);
        }
        break;
      }
      case BlockKind::Switch: {
        bool pred = force_bool(read(ins[0]));
        register_occurrence(M.im.block_decision[bi], 0, pred);
        *out = pred ? read(ins[1]) : read(ins[2]);
        break;
      }
      case BlockKind::Script: {
        const auto& st = store[bi];
        for (size_t p = 0; p < b.inputs.size(); ++p) {
          SVal v = read(ins[p]);
          v.type = b.inputs[p].type;
          script_in[st.in_off + p] = v;
        }
        for (size_t l = 0; l < b.locals.size(); ++l)
          script_local[st.local_off + l] = SVal::constant(b.locals[l].type, 0);
        Ctx c{st, b};
        for (const auto& s : b.body) exec_stmt(c, *s);
        for (size_t p = 0; p < b.outputs.size(); ++p) out[p] = script_out[st.out_off + p];
        break;
      }
    }
  }

  void run() {
    resolve_links();
    for (int step = 0; step < M.K; ++step) {
      cur_step = step;
      try {
        for (int bi : M.m.eval_order) eval_block(bi);
      } catch (const FaultStop&) {
        faulted = true;
        return;
      }
      // latch delay inputs
      for (size_t bi = 0; bi < M.m.blocks.size(); ++bi) {
        if (delay_index[bi] < 0) continue;
        if (!inputs_of[bi].empty()) delay_state[delay_index[bi]] = read(inputs_of[bi][0]);
      }
    }
  }
};

}  // namespace

PathConstraintSystem unroll(const InstrumentedModel& im, int K, int path_cap) {
  PathConstraintSystem pcs;
  pcs.im = &im;
  pcs.layout = layout_test_buffer(im.base);
  pcs.unroll_bound = K;

  SymMachine machine(im, pcs.layout, K);
  pcs.symbols = machine.symbols;

  // target universe: the decision outcome (key 0) and every condition,
  // each in both outcomes
  std::map<std::tuple<int, int, bool>, int> target_of;
  for (const auto& d : im.decisions) {
    std::vector<int> keys = {0};
    if (!d.single())
      for (int c = 1; c <= d.condition_count; ++c) keys.push_back(c);
    for (int key : keys) {
      for (bool outcome : {false, true}) {
        Target t;
        t.decision = d.id;
        t.cond_key = key;
        t.outcome = outcome;
        target_of[{t.decision, t.cond_key, outcome}] = static_cast<int>(pcs.targets.size());
        pcs.targets.push_back(t);
      }
    }
  }

  std::vector<Choice> choices;
  int leaves = 0;
  int attempts = 0;
  for (;;) {
    if (++attempts > path_cap * 4) {  // truncated subtrees must not spin forever
      pcs.enumeration_complete = false;
      break;
    }
    SymRun run(machine, choices, target_of, pcs.targets);
    bool stopped = false;
    try {
      run.run();
    } catch (const StopRun&) {
      stopped = true;
      pcs.enumeration_complete = false;
    }
    {
      PathInfo p;
      p.constraints = std::move(run.constraints);
      p.realized = std::move(run.realized);
      p.opaque = run.opaque;
      p.has_float = run.has_float;
      p.faulted = run.faulted;
      p.truncated = stopped;
      if (!stopped || !p.realized.empty()) pcs.paths.push_back(std::move(p));
      ++leaves;
      if (leaves >= path_cap) {
        // only incomplete if unexplored branches remain
        bool more = false;
        for (const auto& c : choices)
          if (c.value + 1 < c.arity) {
            more = true;
            break;
          }
        if (more) pcs.enumeration_complete = false;
        break;
      }
    }
    // depth-first backtrack: advance the deepest unexhausted choice
    while (!choices.empty() && choices.back().value + 1 >= choices.back().arity)
      choices.pop_back();
    if (choices.empty()) break;
    choices.back().value++;
  }
  pcs.paths_enumerated = leaves;

  // search-only marking: targets reachable only past opaque branches
  std::vector<char> any_clean(pcs.targets.size(), 0), any_realized(pcs.targets.size(), 0);
  for (const auto& p : pcs.paths) {
    for (const auto& r : p.realized) {
      any_realized[r.target] = 1;
      if (!r.opaque_before) any_clean[r.target] = 1;
    }
  }
  for (size_t i = 0; i < pcs.targets.size(); ++i)
    pcs.targets[i].search_only = any_realized[i] && !any_clean[i];

  return pcs;
}

}  // namespace sigfuzz
