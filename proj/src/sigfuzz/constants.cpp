#include "sigfuzz/constants.hpp"

#include <cmath>

namespace sigfuzz {

namespace {

bool looks_float(const std::string& s) {
  return s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
         s.find('E') != std::string::npos;
}

struct Miner {
  ConstantDictionary dict;

  void add_typed(ValueType t, double v) {
    if (t == ValueType::F64)
      dict.add_float(v);
    else if (t != ValueType::Bool)
      dict.add_int(t, static_cast<int64_t>(v));
  }

  void add_raw(const std::string& raw, double v) {
    if (looks_float(raw))
      dict.add_float(v);
    else
      dict.add_int(ValueType::I32, static_cast<int64_t>(v));
  }

  void mine_expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit:
        dict.add_int(ValueType::I32, e.int_val);
        break;
      case ExprKind::FloatLit:
        dict.add_float(e.float_val);
        break;
      case ExprKind::Unary:
        // fold -literal so mined sets carry the signed value
        if (e.un_op == UnOp::Neg && e.lhs->kind == ExprKind::IntLit) {
          dict.add_int(ValueType::I32, -e.lhs->int_val);
        } else if (e.un_op == UnOp::Neg && e.lhs->kind == ExprKind::FloatLit) {
          dict.add_float(-e.lhs->float_val);
        } else {
          mine_expr(*e.lhs);
        }
        break;
      default:
        if (e.lhs) mine_expr(*e.lhs);
        if (e.rhs) mine_expr(*e.rhs);
        break;
    }
  }

  void mine_stmt(const Stmt& s) {
    if (s.expr) mine_expr(*s.expr);
    for (const auto& st : s.then_body) mine_stmt(*st);
    for (const auto& st : s.else_body) mine_stmt(*st);
  }

  void mine_block(const Block& b) {
    switch (b.kind) {
      case BlockKind::Constant:
        add_typed(b.const_value.type, b.const_value.as_double());
        break;
      case BlockKind::Gain:
        add_raw(b.params.at("gain"), b.gain);
        break;
      case BlockKind::UnitDelay:
        if (b.params.count("init")) add_typed(b.delay_init.type, b.delay_init.as_double());
        break;
      case BlockKind::Saturate:
        add_raw(b.params.at("lo"), b.sat_lo);
        add_raw(b.params.at("hi"), b.sat_hi);
        break;
      case BlockKind::Script:
        for (const auto& sv : b.state_vars) add_typed(sv.type, sv.init.as_double());
        for (const auto& st : b.body) mine_stmt(*st);
        break;
      default:
        break;
    }
    for (const auto& [pin, v] : b.const_inputs) add_typed(v.type, v.as_double());
  }
};

}  // namespace

void ConstantDictionary::add_int(ValueType t, int64_t v) {
  auto& bucket = int_buckets_[t];
  bucket.insert(v);
  bucket.insert(v - 1);
  bucket.insert(v + 1);
}

void ConstantDictionary::add_float(double v) {
  if (v != v) return;
  floats_.insert(v);
  floats_.insert(v - 1.0);
  floats_.insert(v + 1.0);
}

const std::set<int64_t>& ConstantDictionary::ints(ValueType t) const {
  static const std::set<int64_t> kEmpty;
  auto it = int_buckets_.find(t);
  return it == int_buckets_.end() ? kEmpty : it->second;
}

bool ConstantDictionary::empty() const {
  for (const auto& [t, b] : int_buckets_)
    if (!b.empty()) return false;
  return floats_.empty();
}

std::vector<double> ConstantDictionary::values_for(ValueType t) const {
  std::set<double> vals;
  if (t == ValueType::F64) {
    for (double v : floats_) vals.insert(v);
    for (const auto& [bt, bucket] : int_buckets_)
      for (int64_t v : bucket) vals.insert(static_cast<double>(v));
  } else {
    for (const auto& [bt, bucket] : int_buckets_)
      for (int64_t v : bucket)
        if (v >= type_min(t) && v <= type_max(t)) vals.insert(static_cast<double>(v));
    for (double v : floats_) {
      double r = std::nearbyint(v);
      if (r >= static_cast<double>(type_min(t)) && r <= static_cast<double>(type_max(t)))
        vals.insert(r);
    }
  }
  return {vals.begin(), vals.end()};
}

ConstantDictionary mine_constants(const ModelIR& model) {
  Miner miner;
  for (const auto& p : model.ports) {
    if (p.range) {
      miner.add_typed(p.value_type, p.range->first);
      miner.add_typed(p.value_type, p.range->second);
    }
    for (double c : p.candidates) miner.add_typed(p.value_type, c);
  }
  for (const auto& b : model.blocks) miner.mine_block(b);
  return miner.dict;
}

}  // namespace sigfuzz
