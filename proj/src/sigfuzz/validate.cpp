#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sigfuzz/ir.hpp"

namespace sigfuzz {

namespace {

struct Checker {
  ModelIR& m;
  std::vector<Diagnostic>& diags;

  void error(SourcePos pos, std::string msg) { diags.push_back({pos, std::move(msg)}); }

  static bool looks_float(const std::string& s) {
    return s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
           s.find('E') != std::string::npos;
  }

  bool parse_literal(const std::string& s, SourcePos pos, Value* out) {
    if (s == "true" || s == "false") {
      *out = Value::of_bool(s == "true");
      return true;
    }
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
      error(pos, "bad literal '" + s + "'");
      return false;
    }
    if (looks_float(s))
      *out = Value::of_double(d);
    else
      *out = Value::of_int(ValueType::I32, static_cast<int64_t>(d));
    return true;
  }

  // --------------------------------------------------------------------------
  void check_header_and_ports() {
    if (m.sample_count < 1) error({}, "sample_count must be positive");
    std::set<std::string> ids;
    for (auto& p : m.ports) {
      if (!ids.insert(p.id).second) error(p.pos, "duplicate id '" + p.id + "'");
      if (p.width < 1) error(p.pos, "port width must be positive");
      if (p.direction == PortDirection::Out && p.kind == PortKind::Constant)
        error(p.pos, "output ports cannot be const");
      if (p.range && p.range->first > p.range->second)
        error(p.pos, "range min exceeds max on port '" + p.id + "'");
      if (!p.candidates.empty() && p.kind != PortKind::Constant)
        error(p.pos, "candidates are only valid on const ports ('" + p.id + "')");
      if (p.range) {
        for (double c : p.candidates)
          if (c < p.range->first || c > p.range->second)
            error(p.pos, "candidate outside declared range on port '" + p.id + "'");
      }
    }
    for (auto& b : m.blocks)
      if (!ids.insert(b.id).second) error(b.pos, "duplicate id '" + b.id + "'");
  }

  // --------------------------------------------------------------------------
  void interpret_params(Block& b) {
    auto take = [&](const char* key) -> const std::string* {
      auto it = b.params.find(key);
      return it == b.params.end() ? nullptr : &it->second;
    };
    std::set<std::string> known;
    auto mark = [&](const char* k) { known.insert(k); };

    switch (b.kind) {
      case BlockKind::Constant: {
        mark("value");
        mark("type");
        const auto* v = take("value");
        if (!v) {
          error(b.pos, "Constant block '" + b.id + "' needs value=");
          break;
        }
        Value val;
        if (!parse_literal(*v, b.pos, &val)) break;
        if (const auto* ty = take("type")) {
          ValueType t;
          if (*ty == "bool") t = ValueType::Bool;
          else if (*ty == "int8") t = ValueType::I8;
          else if (*ty == "int16") t = ValueType::I16;
          else if (*ty == "int32") t = ValueType::I32;
          else if (*ty == "float64") t = ValueType::F64;
          else { error(b.pos, "bad type on Constant '" + b.id + "'"); break; }
          val = coerce(t, val);
        }
        b.const_value = val;
        b.out_type = val.type;
        break;
      }
      case BlockKind::Gain: {
        mark("gain");
        const auto* g = take("gain");
        if (!g) {
          error(b.pos, "Gain block '" + b.id + "' needs gain=");
          break;
        }
        Value val;
        if (!parse_literal(*g, b.pos, &val)) break;
        b.gain = val.as_double();
        b.gain_is_float = val.type == ValueType::F64;
        break;
      }
      case BlockKind::UnitDelay: {
        mark("init");
        if (const auto* v = take("init")) {
          Value val;
          if (parse_literal(*v, b.pos, &val)) b.delay_init = val;
        } else {
          b.delay_init = Value::of_int(ValueType::I32, 0);
        }
        b.out_type = b.delay_init.type;  // first guess; settled with link types
        break;
      }
      case BlockKind::RelationalOp: {
        mark("op");
        const auto* op = take("op");
        if (!op) {
          error(b.pos, "RelationalOp '" + b.id + "' needs op=");
          break;
        }
        if (*op == "<") b.rel_op = RelOpKind::Lt;
        else if (*op == "<=") b.rel_op = RelOpKind::Le;
        else if (*op == ">") b.rel_op = RelOpKind::Gt;
        else if (*op == ">=") b.rel_op = RelOpKind::Ge;
        else if (*op == "==") b.rel_op = RelOpKind::Eq;
        else if (*op == "!=") b.rel_op = RelOpKind::Ne;
        else error(b.pos, "bad relational op '" + *op + "'");
        b.out_type = ValueType::Bool;
        break;
      }
      case BlockKind::LogicOp: {
        mark("op");
        const auto* op = take("op");
        if (!op) {
          error(b.pos, "LogicOp '" + b.id + "' needs op=");
          break;
        }
        std::string o = *op;
        std::transform(o.begin(), o.end(), o.begin(), ::tolower);
        if (o == "and") b.logic_op = LogicOpKind::And;
        else if (o == "or") b.logic_op = LogicOpKind::Or;
        else if (o == "not") b.logic_op = LogicOpKind::Not;
        else error(b.pos, "bad logic op '" + *op + "'");
        b.out_type = ValueType::Bool;
        break;
      }
      case BlockKind::Saturate: {
        mark("lo");
        mark("hi");
        const auto* lo = take("lo");
        const auto* hi = take("hi");
        if (!lo || !hi) {
          error(b.pos, "Saturate '" + b.id + "' needs lo= and hi=");
          break;
        }
        Value vlo, vhi;
        if (!parse_literal(*lo, b.pos, &vlo) || !parse_literal(*hi, b.pos, &vhi)) break;
        b.sat_lo = vlo.as_double();
        b.sat_hi = vhi.as_double();
        if (b.sat_lo > b.sat_hi) error(b.pos, "Saturate lo > hi on '" + b.id + "'");
        break;
      }
      case BlockKind::Add: {
        mark("signs");
        if (const auto* s = take("signs")) {
          for (char c : *s)
            if (c != '+' && c != '-') error(b.pos, "Add signs must be '+'/'-'");
          b.add_signs = *s;
        }
        break;
      }
      case BlockKind::Switch:
      case BlockKind::Script:
        break;
    }

    // inN= constant input bindings are valid on any block
    for (auto& [key, raw] : b.params) {
      if (key.size() > 2 && key.rfind("in", 0) == 0 &&
          std::all_of(key.begin() + 2, key.end(), ::isdigit)) {
        Value v;
        if (parse_literal(raw, b.pos, &v)) b.const_inputs[std::atoi(key.c_str() + 2)] = v;
        continue;
      }
      if (!known.count(key))
        error(b.pos, "unknown param '" + key + "' on block '" + b.id + "'");
    }
  }

  // --------------------------------------------------------------------------
  struct Endpoint {
    bool is_port = false;
    int index = -1;  // port or block index
  };

  bool resolve_endpoint(const LinkEnd& e, SourcePos pos, bool as_source, Endpoint* out) {
    int pi = m.port_index(e.node);
    if (pi >= 0) {
      const auto& p = m.ports[pi];
      if (as_source && p.direction != PortDirection::In) {
        error(pos, "output port '" + e.node + "' cannot be a link source");
        return false;
      }
      if (!as_source && p.direction != PortDirection::Out) {
        error(pos, "input port '" + e.node + "' cannot be a link destination");
        return false;
      }
      if (e.index < 0 || e.index >= p.width) {
        error(pos, "channel " + std::to_string(e.index) + " out of range on port '" + e.node + "'");
        return false;
      }
      out->is_port = true;
      out->index = pi;
      return true;
    }
    int bi = m.block_index(e.node);
    if (bi < 0) {
      error(pos, "link references unknown node '" + e.node + "'");
      return false;
    }
    out->is_port = false;
    out->index = bi;
    return true;
  }

  void check_links_and_arity() {
    // incoming[block index] -> pin -> count
    std::vector<std::map<int, int>> incoming(m.blocks.size());
    std::vector<std::map<int, int>> port_incoming(m.ports.size());

    for (auto& l : m.links) {
      Endpoint src, dst;
      if (!resolve_endpoint(l.src, l.pos, true, &src)) continue;
      if (!resolve_endpoint(l.dst, l.pos, false, &dst)) continue;
      if (!src.is_port) {
        const Block& sb = m.blocks[src.index];
        int outs = sb.kind == BlockKind::Script ? static_cast<int>(sb.outputs.size()) : 1;
        if (l.src.index < 0 || l.src.index >= outs)
          error(l.pos, "source pin out of range on block '" + sb.id + "'");
      }
      if (dst.is_port) {
        port_incoming[dst.index][l.dst.index]++;
      } else {
        incoming[dst.index][l.dst.index]++;
      }
    }

    for (size_t i = 0; i < m.ports.size(); ++i) {
      const auto& p = m.ports[i];
      if (p.direction != PortDirection::Out) continue;
      for (int c = 0; c < p.width; ++c) {
        int n = port_incoming[i].count(c) ? port_incoming[i][c] : 0;
        if (n != 1)
          error(p.pos, "output port '" + p.id + "' channel " + std::to_string(c) +
                           " must have exactly one incoming link");
      }
    }

    for (size_t i = 0; i < m.blocks.size(); ++i) {
      Block& b = m.blocks[i];
      // merge const-bound pins
      std::set<int> pins;
      for (auto& [pin, n] : incoming[i]) {
        if (n > 1) error(b.pos, "block '" + b.id + "' input " + std::to_string(pin) + " has multiple sources");
        if (b.const_inputs.count(pin))
          error(b.pos, "block '" + b.id + "' input " + std::to_string(pin) + " is both linked and constant");
        pins.insert(pin);
      }
      for (auto& [pin, v] : b.const_inputs) pins.insert(pin);

      int expected = -1;  // -1 = variadic
      switch (b.kind) {
        case BlockKind::Constant: expected = 0; break;
        case BlockKind::Gain:
        case BlockKind::UnitDelay:
        case BlockKind::Saturate: expected = 1; break;
        case BlockKind::RelationalOp: expected = 2; break;
        case BlockKind::Switch: expected = 3; break;
        case BlockKind::LogicOp: expected = b.logic_op == LogicOpKind::Not ? 1 : -1; break;
        case BlockKind::Add: expected = -1; break;
        case BlockKind::Script: expected = static_cast<int>(b.inputs.size()); break;
      }
      int count = pins.empty() ? 0 : (*pins.rbegin() + 1);
      if (expected >= 0 && count != expected)
        error(b.pos, "block '" + b.id + "' (" + block_kind_name(b.kind) + ") expects " +
                         std::to_string(expected) + " inputs, has " + std::to_string(count));
      for (int pin = 0; pin < count; ++pin) {
        if (!pins.count(pin))
          error(b.pos, "block '" + b.id + "' input " + std::to_string(pin) +
                           " has no incoming link or constant");
      }
      if (b.kind == BlockKind::Add) {
        if (count < 1) error(b.pos, "Add block '" + b.id + "' needs at least one input");
        if (!b.add_signs.empty() && static_cast<int>(b.add_signs.size()) != count)
          error(b.pos, "Add signs length does not match input count on '" + b.id + "'");
      }
      if (b.kind == BlockKind::LogicOp && b.logic_op != LogicOpKind::Not && count < 2)
        error(b.pos, "LogicOp '" + b.id + "' needs at least two inputs");
      b.input_count = count;
      b.output_count = b.kind == BlockKind::Script ? static_cast<int>(b.outputs.size()) : 1;
      if (b.kind == BlockKind::Script && b.outputs.empty())
        error(b.pos, "script block '" + b.id + "' declares no outputs");
    }
  }

  // --------------------------------------------------------------------------
  void toposort() {
    size_t n = m.blocks.size();
    std::vector<std::vector<int>> adj(n);
    std::vector<int> indeg(n, 0);
    for (auto& l : m.links) {
      int sb = m.block_index(l.src.node);
      int db = m.block_index(l.dst.node);
      if (sb < 0 || db < 0) continue;
      // delays are state: their output is ready before the step and their
      // input latches after it, so neither side constrains the order
      if (m.blocks[sb].kind == BlockKind::UnitDelay) continue;
      if (m.blocks[db].kind == BlockKind::UnitDelay) continue;
      adj[sb].push_back(db);
      indeg[db]++;
    }
    std::vector<int> order;
    std::vector<int> ready;
    for (size_t i = 0; i < n; ++i)
      if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
    // stable: lowest block index first
    while (!ready.empty()) {
      std::sort(ready.begin(), ready.end(), std::greater<int>());
      int b = ready.back();
      ready.pop_back();
      order.push_back(b);
      for (int d : adj[b])
        if (--indeg[d] == 0) ready.push_back(d);
    }
    if (order.size() != n) {
      std::string cyc;
      for (size_t i = 0; i < n; ++i)
        if (indeg[i] > 0) {
          if (!cyc.empty()) cyc += ", ";
          cyc += m.blocks[i].id;
        }
      error({}, "algebraic loop (cycle without UnitDelay) through: " + cyc);
      return;
    }
    m.eval_order = std::move(order);
  }

  // --------------------------------------------------------------------------
  // Types of values flowing on links, then script type checking.

  ValueType source_type(const LinkEnd& e) {
    int pi = m.port_index(e.node);
    if (pi >= 0) return m.ports[pi].value_type;
    int bi = m.block_index(e.node);
    const Block& b = m.blocks[bi];
    if (b.kind == BlockKind::Script) return b.outputs[e.index].type;
    return b.out_type;
  }

  void resolve_block_types() {
    // input source per (block, pin)
    std::vector<std::map<int, const Link*>> in_links(m.blocks.size());
    for (auto& l : m.links) {
      int db = m.block_index(l.dst.node);
      if (db >= 0) in_links[db][l.dst.index] = &l;
    }
    auto input_type = [&](const Block& b, int bi, int pin) -> ValueType {
      auto it = in_links[bi].find(pin);
      if (it != in_links[bi].end()) return source_type(it->second->src);
      auto ci = b.const_inputs.find(pin);
      if (ci != b.const_inputs.end()) return ci->second.type;
      return ValueType::I32;
    };

    // UnitDelay outputs feed back into their own sources, so a single
    // topological pass may see stale delay types. Run silent passes until
    // the types settle, then one final pass that reports errors.
    bool report = false;
    for (size_t pass = 0;; ++pass) {
      bool changed = resolve_types_pass(input_type, report);
      if (report) break;
      if (!changed || pass >= m.blocks.size()) report = true;
    }
  }

  template <typename InputTypeFn>
  bool resolve_types_pass(const InputTypeFn& input_type, bool report) {
    bool changed = false;
    auto set_out = [&](Block& b, ValueType t) {
      if (b.out_type != t) {
        b.out_type = t;
        changed = true;
      }
    };
    for (int bi : m.eval_order) {
      Block& b = m.blocks[bi];
      std::vector<ValueType> ins(b.input_count);
      for (int p = 0; p < b.input_count; ++p) ins[p] = input_type(b, bi, p);
      auto all_numeric = [&](const char* what) {
        bool ok = true;
        for (auto t : ins)
          if (!is_numeric(t)) {
            if (report)
              error(b.pos, std::string(what) + " input of '" + b.id + "' must be numeric");
            ok = false;
          }
        return ok;
      };
      switch (b.kind) {
        case BlockKind::Constant:
          break;
        case BlockKind::Add: {
          if (!all_numeric("Add")) break;
          ValueType t = ValueType::I8;
          for (auto it : ins) {
            if (it == ValueType::F64) { t = ValueType::F64; break; }
            if (type_size(it) > type_size(t)) t = it;
          }
          set_out(b, t);
          break;
        }
        case BlockKind::Gain: {
          if (!all_numeric("Gain")) break;
          set_out(b, (ins[0] == ValueType::F64 || b.gain_is_float) ? ValueType::F64 : ins[0]);
          break;
        }
        case BlockKind::UnitDelay: {
          if (!ins.empty()) set_out(b, ins[0]);
          b.delay_init = coerce(b.out_type, b.delay_init);
          break;
        }
        case BlockKind::RelationalOp: {
          all_numeric("RelationalOp");
          set_out(b, ValueType::Bool);
          break;
        }
        case BlockKind::LogicOp: {
          for (auto t : ins)
            if (t != ValueType::Bool && report)
              error(b.pos, "LogicOp '" + b.id + "' inputs must be bool");
          set_out(b, ValueType::Bool);
          break;
        }
        case BlockKind::Switch: {
          if (ins.size() == 3) {
            if (ins[0] != ValueType::Bool && report)
              error(b.pos, "Switch '" + b.id + "' predicate (input 0) must be bool");
            if (ins[1] == ValueType::Bool || ins[2] == ValueType::Bool) {
              if (ins[1] != ins[2] && report)
                error(b.pos, "Switch '" + b.id + "' branch types must match");
              set_out(b, ins[1]);
            } else {
              ValueType t = ValueType::I8;
              for (int p = 1; p <= 2; ++p) {
                if (ins[p] == ValueType::F64) { t = ValueType::F64; break; }
                if (type_size(ins[p]) > type_size(t)) t = ins[p];
              }
              set_out(b, t);
            }
          }
          break;
        }
        case BlockKind::Saturate: {
          if (!all_numeric("Saturate")) break;
          set_out(b, ins[0]);
          break;
        }
        case BlockKind::Script: {
          if (!report) break;
          for (size_t p = 0; p < ins.size(); ++p) {
            ValueType want = b.inputs[p].type;
            ValueType got = ins[p];
            bool ok = (want == got) || (is_numeric(want) && is_numeric(got));
            if (!ok)
              error(b.pos, "script '" + b.id + "' input '" + b.inputs[p].name +
                               "' expects " + type_name(want) + ", got " + type_name(got));
          }
          break;
        }
      }
    }
    return changed;
  }

  // --------------------------------------------------------------------------
  // Script body resolution & typing.

  struct Scope {
    Block& b;
    std::map<std::string, std::pair<VarSlot, int>> names;
    Checker& ck;

    Scope(Block& blk, Checker& c) : b(blk), ck(c) {
      for (size_t i = 0; i < b.inputs.size(); ++i)
        add(b.inputs[i].name, VarSlot::Input, static_cast<int>(i), b.pos);
      for (size_t i = 0; i < b.outputs.size(); ++i)
        add(b.outputs[i].name, VarSlot::Output, static_cast<int>(i), b.pos);
      for (size_t i = 0; i < b.state_vars.size(); ++i)
        add(b.state_vars[i].name, VarSlot::State, static_cast<int>(i), b.pos);
    }

    void add(const std::string& n, VarSlot s, int idx, SourcePos pos) {
      if (!names.emplace(n, std::make_pair(s, idx)).second)
        ck.error(pos, "duplicate name '" + n + "' in script '" + b.id + "'");
    }

    ValueType type_of(VarSlot s, int idx) const {
      switch (s) {
        case VarSlot::Input: return b.inputs[idx].type;
        case VarSlot::Output: return b.outputs[idx].type;
        case VarSlot::State: return b.state_vars[idx].type;
        case VarSlot::Local: return b.locals[idx].type;
        default: return ValueType::I32;
      }
    }
  };

  void check_script(Block& b) {
    Scope scope(b, *this);
    for (auto& s : b.body) check_stmt(scope, *s);
  }

  void check_stmt(Scope& sc, Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign: {
        // RHS first: locals may not reference themselves before assignment
        ValueType rt = check_expr(sc, *s.expr, /*allow_bool_lit=*/true);
        auto it = sc.names.find(s.target);
        if (it == sc.names.end()) {
          int idx = static_cast<int>(sc.b.locals.size());
          sc.b.locals.push_back(ScriptPin{s.target, rt});
          sc.add(s.target, VarSlot::Local, idx, s.pos);
          s.target_slot = VarSlot::Local;
          s.target_index = idx;
        } else {
          s.target_slot = it->second.first;
          s.target_index = it->second.second;
        }
        ValueType tt = sc.type_of(s.target_slot, s.target_index);
        bool ok = (tt == rt) || (is_numeric(tt) && is_numeric(rt));
        if (!ok)
          error(s.pos, "cannot assign " + std::string(type_name(rt)) + " to '" + s.target +
                           "' of type " + type_name(tt));
        break;
      }
      case StmtKind::If:
      case StmtKind::While: {
        ValueType ct = check_expr(sc, *s.expr, false);
        if (ct != ValueType::Bool) error(s.expr->pos, "condition must be bool");
        for (auto& st : s.then_body) check_stmt(sc, *st);
        for (auto& st : s.else_body) check_stmt(sc, *st);
        break;
      }
      case StmtKind::ExprStmt:
        check_expr(sc, *s.expr, false);
        break;
    }
  }

  ValueType check_expr(Scope& sc, Expr& e, bool allow_bool_lit) {
    switch (e.kind) {
      case ExprKind::IntLit:
        if (e.int_val < INT32_MIN || e.int_val > INT32_MAX)
          error(e.pos, "integer literal out of int32 range");
        e.type = ValueType::I32;
        return e.type;
      case ExprKind::FloatLit:
        e.type = ValueType::F64;
        return e.type;
      case ExprKind::BoolLit:
        if (!allow_bool_lit)
          error(e.pos, "bool literal only allowed as a whole assignment value");
        e.type = ValueType::Bool;
        return e.type;
      case ExprKind::Var: {
        auto it = sc.names.find(e.name);
        if (it == sc.names.end()) {
          error(e.pos, "unknown identifier '" + e.name + "' in script '" + sc.b.id + "'");
          e.type = ValueType::I32;
          return e.type;
        }
        e.slot = it->second.first;
        e.slot_index = it->second.second;
        e.type = sc.type_of(e.slot, e.slot_index);
        return e.type;
      }
      case ExprKind::Unary: {
        ValueType t = check_expr(sc, *e.lhs, false);
        if (e.un_op == UnOp::Not) {
          if (t != ValueType::Bool) error(e.pos, "'!' needs a bool operand");
          e.type = ValueType::Bool;
        } else {
          if (!is_numeric(t)) error(e.pos, "'-' needs a numeric operand");
          e.type = t;
        }
        return e.type;
      }
      case ExprKind::Binary: {
        ValueType lt = check_expr(sc, *e.lhs, false);
        ValueType rt = check_expr(sc, *e.rhs, false);
        if (e.bin_op == BinOp::And || e.bin_op == BinOp::Or) {
          if (lt != ValueType::Bool || rt != ValueType::Bool)
            error(e.pos, "'" + std::string(binop_name(e.bin_op)) + "' needs bool operands");
          e.type = ValueType::Bool;
        } else if (e.bin_op == BinOp::Eq || e.bin_op == BinOp::Ne) {
          bool both_bool = lt == ValueType::Bool && rt == ValueType::Bool;
          bool both_num = is_numeric(lt) && is_numeric(rt);
          if (!both_bool && !both_num)
            error(e.pos, "'==' / '!=' operands must both be bool or both numeric");
          e.type = ValueType::Bool;
        } else if (is_relational(e.bin_op)) {
          if (!is_numeric(lt) || !is_numeric(rt))
            error(e.pos, "relational operands must be numeric");
          e.type = ValueType::Bool;
        } else {  // arithmetic
          if (!is_numeric(lt) || !is_numeric(rt))
            error(e.pos, "arithmetic operands must be numeric");
          if (lt == ValueType::F64 || rt == ValueType::F64)
            e.type = ValueType::F64;
          else
            e.type = type_size(lt) >= type_size(rt) ? lt : rt;
        }
        return e.type;
      }
      case ExprKind::PostInc: {
        ValueType t = check_expr(sc, *e.lhs, false);
        if (!is_integer(t)) error(e.pos, "'++' needs an integer variable");
        e.type = t;
        return e.type;
      }
      case ExprKind::Record:
        // never present pre-instrumentation
        e.type = ValueType::Bool;
        return e.type;
    }
    return ValueType::I32;
  }
};

}  // namespace

std::vector<Diagnostic> validate_model(ModelIR& m) {
  std::vector<Diagnostic> diags;
  Checker ck{m, diags};
  ck.check_header_and_ports();
  if (!diags.empty()) return diags;
  for (auto& b : m.blocks) ck.interpret_params(b);
  ck.check_links_and_arity();
  if (!diags.empty()) return diags;
  ck.toposort();
  if (!diags.empty()) return diags;
  ck.resolve_block_types();
  for (auto& b : m.blocks) {
    if (b.kind == BlockKind::Script) {
      b.locals.clear();
      ck.check_script(b);
    }
  }
  return diags;
}

}  // namespace sigfuzz
