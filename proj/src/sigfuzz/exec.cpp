#include "sigfuzz/exec.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace sigfuzz {

const char* origin_name(SeedOrigin o) {
  switch (o) {
    case SeedOrigin::Bmc: return "bmc";
    case SeedOrigin::Nwise: return "nwise";
    case SeedOrigin::Mutation: return "mutation";
    case SeedOrigin::Random: return "random";
  }
  return "?";
}

const char* fault_name(FaultKind k) {
  switch (k) {
    case FaultKind::IntDivByZero: return "int-div-by-zero";
    case FaultKind::LoopCapExceeded: return "loop-cap-exceeded";
  }
  return "?";
}

std::string Signature::hex() const {
  char buf[33];
  snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
           static_cast<unsigned long long>(lo));
  return buf;
}

BoundInputs bind_inputs(const TestCase& test, const BufferLayout& layout, const ModelIR& model) {
  BoundInputs out;
  if (test.bytes.size() != layout.total_bytes) {
    out.error = "test case is " + std::to_string(test.bytes.size()) + " bytes, layout needs " +
                std::to_string(layout.total_bytes);
    return out;
  }
  out.streams.resize(layout.entries.size());
  for (size_t ei = 0; ei < layout.entries.size(); ++ei) {
    const auto& e = layout.entries[ei];
    const auto& port = model.ports[e.port_index];
    auto& stream = out.streams[ei];
    stream.resize(e.elem_count * e.width);
    size_t scalar_size = type_size(e.value_type);
    const uint8_t* base = test.bytes.data() + e.offset;
    for (size_t i = 0; i < stream.size(); ++i)
      stream[i] = clamp_to_port(port, decode_scalar(base + i * scalar_size, e.value_type));
  }
  out.ok = true;
  return out;
}

namespace {

constexpr int kLoopCap = 10000;
constexpr size_t kEvalDedupCap = 4096;

struct FaultEx {
  FaultKind kind;
};

struct Source {
  enum Kind : uint8_t { PortChannel, BlockOut, Const } kind = Const;
  int entry = 0;    // PortChannel: layout entry index
  int channel = 0;  // PortChannel
  int out_index = 0;  // BlockOut: flat output slot
  Value cval;
};

}  // namespace

struct Executor::Impl {
  const InstrumentedModel* im = nullptr;  // null when uninstrumented
  const ModelIR* model = nullptr;
  BufferLayout layout;

  std::vector<std::vector<Source>> block_inputs;
  std::vector<int> out_base;
  int total_outs = 0;

  struct OutPort {
    int port_index;
    int width;
    ValueType type;
    std::vector<Source> sources;  // one per channel
  };
  std::vector<OutPort> out_ports;

  std::vector<int> delay_index;  // block index -> slot in delay_state, -1 otherwise
  std::vector<int> delay_blocks;

  struct ScriptStorage {
    int in_off = 0, out_off = 0, state_off = 0, local_off = 0;
  };
  std::vector<ScriptStorage> script_store;  // per block index (scripts only meaningful)
  int n_script_in = 0, n_script_out = 0, n_script_state = 0, n_script_local = 0;

  std::unordered_map<const Stmt*, int> while_index;
  int n_whiles = 0;

  // scratch, reused across runs
  std::vector<std::vector<double>> streams;
  std::vector<Value> block_out;
  std::vector<Value> delay_state;
  std::vector<Value> script_in, script_out, script_state, script_local;
  std::vector<int> while_counters;
  ExecutionTrace trace;
  uint64_t cur_word = 0, cur_mask = 0;

  void build(const ModelIR& m) {
    model = &m;
    layout = layout_test_buffer(m);

    size_t nb = m.blocks.size();
    out_base.resize(nb);
    int off = 0;
    for (size_t i = 0; i < nb; ++i) {
      out_base[i] = off;
      off += m.blocks[i].output_count;
    }
    total_outs = off;

    delay_index.assign(nb, -1);
    script_store.resize(nb);
    for (size_t i = 0; i < nb; ++i) {
      const Block& b = m.blocks[i];
      if (b.kind == BlockKind::UnitDelay) {
        delay_index[i] = static_cast<int>(delay_blocks.size());
        delay_blocks.push_back(static_cast<int>(i));
      }
      if (b.kind == BlockKind::Script) {
        script_store[i] = {n_script_in, n_script_out, n_script_state, n_script_local};
        n_script_in += static_cast<int>(b.inputs.size());
        n_script_out += static_cast<int>(b.outputs.size());
        n_script_state += static_cast<int>(b.state_vars.size());
        n_script_local += static_cast<int>(b.locals.size());
        for (const auto& s : b.body) index_whiles(*s);
      }
    }

    // resolve link sources
    std::unordered_map<std::string, int> entry_of_port;
    for (size_t ei = 0; ei < layout.entries.size(); ++ei)
      entry_of_port[layout.entries[ei].port_id] = static_cast<int>(ei);

    auto resolve = [&](const LinkEnd& src) -> Source {
      Source s;
      int pi = m.port_index(src.node);
      if (pi >= 0) {
        s.kind = Source::PortChannel;
        s.entry = entry_of_port.at(src.node);
        s.channel = src.index;
        return s;
      }
      int bi = m.block_index(src.node);
      s.kind = Source::BlockOut;
      s.out_index = out_base[bi] + src.index;
      return s;
    };

    block_inputs.resize(nb);
    for (size_t i = 0; i < nb; ++i) {
      block_inputs[i].resize(m.blocks[i].input_count);
      for (const auto& [pin, v] : m.blocks[i].const_inputs) {
        Source s;
        s.kind = Source::Const;
        s.cval = v;
        block_inputs[i][pin] = s;
      }
    }
    std::unordered_map<std::string, int> out_ordinal;
    for (int pi : m.output_port_indices()) {
      OutPort op;
      op.port_index = pi;
      op.width = m.ports[pi].width;
      op.type = m.ports[pi].value_type;
      op.sources.resize(op.width);
      out_ordinal[m.ports[pi].id] = static_cast<int>(out_ports.size());
      out_ports.push_back(std::move(op));
    }
    for (const auto& l : m.links) {
      int dbi = m.block_index(l.dst.node);
      if (dbi >= 0) {
        block_inputs[dbi][l.dst.index] = resolve(l.src);
      } else {
        auto& op = out_ports[out_ordinal.at(l.dst.node)];
        op.sources[l.dst.index] = resolve(l.src);
      }
    }

    // scratch
    streams.resize(layout.entries.size());
    block_out.resize(total_outs);
    delay_state.resize(delay_blocks.size());
    script_in.resize(n_script_in);
    script_out.resize(n_script_out);
    script_state.resize(n_script_state);
    script_local.resize(n_script_local);
    while_counters.resize(n_whiles);
    trace.outputs.resize(out_ports.size());
    trace.unit_hits.resize(nb);
    if (im) trace.evaluations.resize(im->decisions.size());
  }

  void index_whiles(const Stmt& s) {
    if (s.kind == StmtKind::While) while_index[&s] = n_whiles++;
    for (const auto& st : s.then_body) index_whiles(*st);
    for (const auto& st : s.else_body) index_whiles(*st);
  }

  // --- coverage ------------------------------------------------------------

  void commit(int d) {
    DecisionEval ev{cur_word, cur_mask};
    cur_word = 0;
    cur_mask = 0;
    auto& evs = trace.evaluations[d];
    for (const auto& x : evs)
      if (x == ev) return;
    if (evs.size() < kEvalDedupCap) evs.push_back(ev);
  }

  bool record(bool res, int cond_index, int decision_id, bool top) {
    cur_word |= static_cast<uint64_t>(res) << cond_index;
    cur_mask |= 1ull << cond_index;
    if (top) commit(decision_id);
    return res;
  }

  // --- input reads -----------------------------------------------------------

  int cur_step = 0;

  Value read_port_channel(int entry, int channel) const {
    const auto& e = layout.entries[entry];
    const auto& stream = streams[entry];
    double d = e.elem_count == 1 ? stream[channel]
                                 : stream[static_cast<size_t>(cur_step) * e.width + channel];
    switch (e.value_type) {
      case ValueType::Bool: return Value::of_bool(d != 0.0);
      case ValueType::F64: return Value::of_double(d);
      default: return Value::of_int(e.value_type, static_cast<int64_t>(d));
    }
  }

  Value read(const Source& s) const {
    switch (s.kind) {
      case Source::PortChannel: return read_port_channel(s.entry, s.channel);
      case Source::BlockOut: return block_out[s.out_index];
      case Source::Const: return s.cval;
    }
    return Value{};
  }

  // --- script interpretation --------------------------------------------------

  struct Ctx {
    Impl& M;
    const ScriptStorage& st;
    const Block& b;
  };

  Value* var_slot(Ctx& c, VarSlot slot, int idx) {
    switch (slot) {
      case VarSlot::Input: return &script_in[c.st.in_off + idx];
      case VarSlot::Output: return &script_out[c.st.out_off + idx];
      case VarSlot::State: return &script_state[c.st.state_off + idx];
      case VarSlot::Local: return &script_local[c.st.local_off + idx];
      default: return nullptr;
    }
  }

  Value eval(Ctx& c, const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Value::of_int(ValueType::I32, e.int_val);
      case ExprKind::FloatLit: return Value::of_double(e.float_val);
      case ExprKind::BoolLit: return Value::of_bool(e.bool_val);
      case ExprKind::Var: return *var_slot(c, e.slot, e.slot_index);
      case ExprKind::Unary: {
        Value v = eval(c, *e.lhs);
        if (e.un_op == UnOp::Not) return Value::of_bool(!v.as_bool());
        if (v.type == ValueType::F64) return Value::of_double(-v.f);
        return Value::of_int(e.type, -v.i);
      }
      case ExprKind::PostInc: {
        Value* slot = var_slot(c, e.lhs->slot, e.lhs->slot_index);
        Value old = *slot;
        slot->i = wrap_to(slot->type, slot->i + 1);
        return old;
      }
      case ExprKind::Record: {
        bool res = eval(c, *e.lhs).as_bool();
        return Value::of_bool(record(res, e.cond_index, e.decision_id, e.is_decision_top));
      }
      case ExprKind::Binary:
        return eval_binary(c, e);
    }
    return Value{};
  }

  Value eval_binary(Ctx& c, const Expr& e) {
    // short-circuit forms first: the right operand (and any record calls in
    // it) must not run when the left side settles the result
    if (e.bin_op == BinOp::And) {
      if (!eval(c, *e.lhs).as_bool()) return Value::of_bool(false);
      return Value::of_bool(eval(c, *e.rhs).as_bool());
    }
    if (e.bin_op == BinOp::Or) {
      if (eval(c, *e.lhs).as_bool()) return Value::of_bool(true);
      return Value::of_bool(eval(c, *e.rhs).as_bool());
    }
    Value a = eval(c, *e.lhs);
    Value b = eval(c, *e.rhs);
    if (is_relational(e.bin_op)) {
      if (a.type == ValueType::Bool && b.type == ValueType::Bool) {
        bool res = e.bin_op == BinOp::Eq ? a.i == b.i : a.i != b.i;
        return Value::of_bool(res);
      }
      bool res;
      if (a.type == ValueType::F64 || b.type == ValueType::F64) {
        double x = a.as_double(), y = b.as_double();
        switch (e.bin_op) {
          case BinOp::Lt: res = x < y; break;
          case BinOp::Le: res = x <= y; break;
          case BinOp::Gt: res = x > y; break;
          case BinOp::Ge: res = x >= y; break;
          case BinOp::Eq: res = x == y; break;
          default: res = x != y; break;
        }
      } else {
        int64_t x = a.i, y = b.i;
        switch (e.bin_op) {
          case BinOp::Lt: res = x < y; break;
          case BinOp::Le: res = x <= y; break;
          case BinOp::Gt: res = x > y; break;
          case BinOp::Ge: res = x >= y; break;
          case BinOp::Eq: res = x == y; break;
          default: res = x != y; break;
        }
      }
      return Value::of_bool(res);
    }
    // arithmetic
    if (e.type == ValueType::F64) {
      double x = a.as_double(), y = b.as_double();
      switch (e.bin_op) {
        case BinOp::Add: return Value::of_double(x + y);
        case BinOp::Sub: return Value::of_double(x - y);
        case BinOp::Mul: return Value::of_double(x * y);
        default: return Value::of_double(x / y);  // IEEE: /0 -> inf
      }
    }
    int64_t x = a.as_int(), y = b.as_int();
    switch (e.bin_op) {
      case BinOp::Add: return Value::of_int(e.type, x + y);
      case BinOp::Sub: return Value::of_int(e.type, x - y);
      case BinOp::Mul: return Value::of_int(e.type, x * y);
      default:
        if (y == 0) throw FaultEx{FaultKind::IntDivByZero};
        return Value::of_int(e.type, x / y);
    }
  }

  void exec_stmt(Ctx& c, const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign: {
        Value v = eval(c, *s.expr);
        Value* slot = var_slot(c, s.target_slot, s.target_index);
        ValueType t = slot->type;
        *slot = coerce(t, v);
        break;
      }
      case StmtKind::If:
        if (eval(c, *s.expr).as_bool()) {
          for (const auto& st : s.then_body) exec_stmt(c, *st);
        } else {
          for (const auto& st : s.else_body) exec_stmt(c, *st);
        }
        break;
      case StmtKind::While: {
        int& counter = while_counters[while_index.at(&s)];
        while (eval(c, *s.expr).as_bool()) {
          if (++counter > kLoopCap) throw FaultEx{FaultKind::LoopCapExceeded};
          for (const auto& st : s.then_body) exec_stmt(c, *st);
        }
        break;
      }
      case StmtKind::ExprStmt:
        eval(c, *s.expr);
        break;
    }
  }

  // --- block evaluation --------------------------------------------------------

  void eval_block(int bi) {
    const Block& b = model->blocks[bi];
    trace.unit_hits[bi] = 1;
    Value* out = &block_out[out_base[bi]];
    const auto& ins = block_inputs[bi];
    switch (b.kind) {
      case BlockKind::Constant:
        *out = b.const_value;
        break;
      case BlockKind::UnitDelay:
        *out = delay_state[delay_index[bi]];
        break;
      case BlockKind::Add: {
        if (b.out_type == ValueType::F64) {
          double acc = 0;
          for (size_t p = 0; p < ins.size(); ++p) {
            double v = read(ins[p]).as_double();
            acc += (p < b.add_signs.size() && b.add_signs[p] == '-') ? -v : v;
          }
          *out = Value::of_double(acc);
        } else {
          int64_t acc = 0;
          for (size_t p = 0; p < ins.size(); ++p) {
            int64_t v = read(ins[p]).as_int();
            acc += (p < b.add_signs.size() && b.add_signs[p] == '-') ? -v : v;
          }
          *out = Value::of_int(b.out_type, acc);
        }
        break;
      }
      case BlockKind::Gain: {
        Value v = read(ins[0]);
        if (b.out_type == ValueType::F64)
          *out = Value::of_double(v.as_double() * b.gain);
        else
          *out = Value::of_int(b.out_type, v.as_int() * static_cast<int64_t>(b.gain));
        break;
      }
      case BlockKind::Saturate: {
        Value v = read(ins[0]);
        double d = v.as_double();
        if (d < b.sat_lo) d = b.sat_lo;
        if (d > b.sat_hi) d = b.sat_hi;
        *out = coerce(b.out_type, Value::of_double(d));
        break;
      }
      case BlockKind::RelationalOp: {
        Value a = read(ins[0]);
        Value c2 = read(ins[1]);
        bool res;
        if (a.type == ValueType::F64 || c2.type == ValueType::F64) {
          double x = a.as_double(), y = c2.as_double();
          switch (b.rel_op) {
            case RelOpKind::Lt: res = x < y; break;
            case RelOpKind::Le: res = x <= y; break;
            case RelOpKind::Gt: res = x > y; break;
            case RelOpKind::Ge: res = x >= y; break;
            case RelOpKind::Eq: res = x == y; break;
            default: res = x != y; break;
          }
        } else {
          int64_t x = a.as_int(), y = c2.as_int();
          switch (b.rel_op) {
            case RelOpKind::Lt: res = x < y; break;
            case RelOpKind::Le: res = x <= y; break;
            case RelOpKind::Gt: res = x > y; break;
            case RelOpKind::Ge: res = x >= y; break;
            case RelOpKind::Eq: res = x == y; break;
            default: res = x != y; break;
          }
        }
        if (im) {
          int d = im->block_decision[bi];
          cur_word = res ? 1u : 0u;
          cur_mask = 1u;
          commit(d);
        }
        *out = Value::of_bool(res);
        break;
      }
      case BlockKind::LogicOp: {
        bool res;
        if (b.logic_op == LogicOpKind::Not) {
          bool v = read(ins[0]).as_bool();
          res = !v;
          if (im) {
            cur_word = res ? 1u : 0u;
            cur_mask = 1u;
            commit(im->block_decision[bi]);
          }
        } else {
          // dataflow inputs are already computed: record every condition
          uint64_t word = 0, mask = 1;
          bool acc = b.logic_op == LogicOpKind::And;
          for (size_t p = 0; p < ins.size(); ++p) {
            bool v = read(ins[p]).as_bool();
            word |= static_cast<uint64_t>(v) << (p + 1);
            mask |= 1ull << (p + 1);
            if (b.logic_op == LogicOpKind::And)
              acc = acc && v;
            else
              acc = acc || v;
          }
          res = acc;
          if (im) {
            cur_word = word | (res ? 1u : 0u);
            cur_mask = mask;
            commit(im->block_decision[bi]);
          }
        }
        *out = Value::of_bool(res);
        break;
      }
      case BlockKind::Switch: {
        bool pred = read(ins[0]).as_bool();
        if (im) {
          cur_word = pred ? 1u : 0u;
          cur_mask = 1u;
          commit(im->block_decision[bi]);
        }
        Value v = pred ? read(ins[1]) : read(ins[2]);
        *out = coerce(b.out_type, v);
        break;
      }
      case BlockKind::Script: {
        const auto& st = script_store[bi];
        for (size_t p = 0; p < b.inputs.size(); ++p)
          script_in[st.in_off + p] = coerce(b.inputs[p].type, read(ins[p]));
        for (size_t l = 0; l < b.locals.size(); ++l) {
          Value z;
          z.type = b.locals[l].type;
          script_local[st.local_off + l] = coerce(b.locals[l].type, z);
        }
        Ctx c{*this, st, b};
        for (const auto& s : b.body) exec_stmt(c, *s);
        for (size_t p = 0; p < b.outputs.size(); ++p) out[p] = script_out[st.out_off + p];
        break;
      }
    }
  }

  const ExecutionTrace& run(const TestCase& test, bool capture_states) {
    // reset scratch
    for (auto& e : trace.evaluations) e.clear();
    for (auto& o : trace.outputs) o.clear();
    std::fill(trace.unit_hits.begin(), trace.unit_hits.end(), 0);
    trace.fault.reset();
    trace.steps_executed = 0;
    trace.state_trace.clear();
    cur_word = 0;
    cur_mask = 0;

    // decode + clamp inputs
    if (test.bytes.size() != layout.total_bytes)
      throw std::invalid_argument("test case length does not match layout");
    for (size_t ei = 0; ei < layout.entries.size(); ++ei) {
      const auto& e = layout.entries[ei];
      const auto& port = model->ports[e.port_index];
      auto& stream = streams[ei];
      stream.resize(e.elem_count * e.width);
      size_t sz = type_size(e.value_type);
      const uint8_t* base = test.bytes.data() + e.offset;
      for (size_t i = 0; i < stream.size(); ++i)
        stream[i] = clamp_to_port(port, decode_scalar(base + i * sz, e.value_type));
    }

    // init state
    for (size_t i = 0; i < delay_blocks.size(); ++i)
      delay_state[i] = model->blocks[delay_blocks[i]].delay_init;
    for (size_t bi = 0; bi < model->blocks.size(); ++bi) {
      const Block& b = model->blocks[bi];
      if (b.kind != BlockKind::Script) continue;
      const auto& st = script_store[bi];
      for (size_t v = 0; v < b.state_vars.size(); ++v)
        script_state[st.state_off + v] = b.state_vars[v].init;
      for (size_t p = 0; p < b.outputs.size(); ++p) {
        Value z;
        z.type = b.outputs[p].type;
        script_out[st.out_off + p] = coerce(b.outputs[p].type, z);
      }
    }

    int steps = model->sample_count;
    for (int step = 0; step < steps; ++step) {
      cur_step = step;
      std::fill(while_counters.begin(), while_counters.end(), 0);
      try {
        for (int bi : model->eval_order) eval_block(bi);
      } catch (const FaultEx& f) {
        trace.fault = Fault{f.kind, step};
        cur_word = 0;
        cur_mask = 0;
        return trace;
      }
      for (size_t oi = 0; oi < out_ports.size(); ++oi) {
        auto& op = out_ports[oi];
        for (int c = 0; c < op.width; ++c)
          trace.outputs[oi].push_back(coerce(op.type, read(op.sources[c])));
      }
      // delays latch their inputs at the end of the step
      for (size_t i = 0; i < delay_blocks.size(); ++i) {
        int bi = delay_blocks[i];
        if (!block_inputs[bi].empty())
          delay_state[i] = coerce(model->blocks[bi].out_type, read(block_inputs[bi][0]));
      }
      if (capture_states) {
        std::vector<Value> snap;
        snap.reserve(script_state.size() + delay_state.size());
        for (const auto& v : script_state) snap.push_back(v);
        for (const auto& v : delay_state) snap.push_back(v);
        trace.state_trace.push_back(std::move(snap));
      }
      trace.steps_executed = step + 1;
    }
    return trace;
  }
};

Executor::Executor(const InstrumentedModel& im) : impl_(std::make_unique<Impl>()) {
  impl_->im = &im;
  impl_->build(im.base);
}

Executor::Executor(const ModelIR& model) : impl_(std::make_unique<Impl>()) {
  impl_->build(model);
}

Executor::~Executor() = default;
Executor::Executor(Executor&&) noexcept = default;

const BufferLayout& Executor::layout() const { return impl_->layout; }

const ExecutionTrace& Executor::run(const TestCase& test, bool capture_states) {
  return impl_->run(test, capture_states);
}

}  // namespace sigfuzz
