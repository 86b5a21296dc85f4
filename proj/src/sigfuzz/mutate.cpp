#include "sigfuzz/mutate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sigfuzz {

namespace {
constexpr double kTau = 6.283185307179586;
}

Mutator::Mutator(const ModelIR& model, const BufferLayout& layout, const ConstantDictionary& dict,
                 MutationConfig cfg)
    : model_(&model), layout_(layout), cfg_(cfg) {
  mined_.resize(5);
  for (ValueType t : {ValueType::Bool, ValueType::I8, ValueType::I16, ValueType::I32, ValueType::F64})
    mined_[static_cast<int>(t)] = dict.values_for(t);

  size_t slot = 0;
  for (const auto& e : layout_.entries) {
    size_t n = e.elem_count * e.width;
    if (e.value_type != ValueType::Bool)
      for (size_t i = 0; i < n; ++i) numeric_slots_.push_back(slot + i);
    if (e.elem_count > 1) {
      for (int ch = 0; ch < e.width; ++ch) {
        Stream s{static_cast<int>(&e - layout_.entries.data()), ch, e.elem_count};
        signal_streams_.push_back(s);
        if (e.value_type != ValueType::Bool) numeric_streams_.push_back(s);
      }
    }
    slot += n;
  }
}

const PortDecl& Mutator::slot_port(size_t slot) const {
  auto s = layout_.scalar_slot(slot);
  return model_->ports[layout_.entries[s.entry].port_index];
}

double Mutator::draw_value(const PortDecl& port, Rng& rng) const {
  const auto& mined = mined_[static_cast<int>(port.value_type)];
  if (!mined.empty() && rng.chance(0.5)) return mined[rng.below(mined.size())];
  switch (port.value_type) {
    case ValueType::Bool:
      return static_cast<double>(rng.below(2));
    case ValueType::F64: {
      double lo = port.has_range() ? port.range_min() : -1e9;
      double hi = port.has_range() ? port.range_max() : 1e9;
      return rng.range_f64(lo, hi);
    }
    default:
      return static_cast<double>(
          rng.range_i64(static_cast<int64_t>(port.range_min()),
                        static_cast<int64_t>(port.range_max())));
  }
}

void Mutator::mut_random_set(std::vector<uint8_t>& bytes, Rng& rng) const {
  size_t slots = layout_.scalar_slot_count();
  if (slots == 0 || bytes.empty()) return;
  int count = 1 + static_cast<int>(rng.below(8));
  for (int i = 0; i < count; ++i) {
    size_t slot = rng.below(slots);
    const PortDecl& port = slot_port(slot);
    auto s = layout_.scalar_slot(slot);
    encode_scalar(bytes.data() + layout_.slot_byte_offset(s),
                  layout_.entries[s.entry].value_type, draw_value(port, rng));
  }
}

void Mutator::mut_bit_flip(std::vector<uint8_t>& bytes, Rng& rng) const {
  if (bytes.empty()) return;
  int count = 1 + static_cast<int>(rng.below(8));
  for (int i = 0; i < count; ++i) bytes[rng.below(bytes.size())] ^= 0xff;
}

std::vector<std::vector<uint8_t>> Mutator::deterministic_bit_flips(
    const std::vector<uint8_t>& b) const {
  std::vector<std::vector<uint8_t>> children;
  children.reserve(b.size());
  for (size_t i = 0; i < b.size(); ++i) {
    std::vector<uint8_t> c = b;
    c[i] ^= 0xff;
    children.push_back(std::move(c));
  }
  return children;
}

void Mutator::mut_math(std::vector<uint8_t>& bytes, Rng& rng) const {
  if (numeric_slots_.empty() || bytes.empty()) return;
  int count = 1 + static_cast<int>(rng.below(4));
  for (int i = 0; i < count; ++i) {
    size_t slot = numeric_slots_[rng.below(numeric_slots_.size())];
    auto s = layout_.scalar_slot(slot);
    ValueType t = layout_.entries[s.entry].value_type;
    uint8_t* p = bytes.data() + layout_.slot_byte_offset(s);
    double cur = decode_scalar(p, t);
    int op = static_cast<int>(rng.below(4));
    int64_t operand = op < 2 ? rng.range_i64(1, cfg_.math_max)
                             : rng.range_i64(2, std::max(2, cfg_.math_max));
    if (t == ValueType::F64) {
      double v = cur;
      switch (op) {
        case 0: v += operand; break;
        case 1: v -= operand; break;
        case 2: v *= operand; break;
        default: v /= operand; break;
      }
      encode_scalar(p, t, v);
    } else {
      int64_t v = static_cast<int64_t>(cur);
      switch (op) {
        case 0: v += operand; break;
        case 1: v -= operand; break;
        case 2: v *= operand; break;
        default: v /= operand; break;
      }
      encode_scalar(p, t, static_cast<double>(wrap_to(t, v)));
    }
  }
}

void Mutator::mut_havoc(std::vector<uint8_t>& bytes, Rng& rng,
                        const std::vector<const TestCase*>& pool) const {
  if (bytes.empty()) return;
  int count = 2 + static_cast<int>(rng.below(15));
  size_t slots = layout_.scalar_slot_count();
  for (int i = 0; i < count; ++i) {
    switch (rng.below(4)) {
      case 0: {  // typed extreme
        if (slots == 0) break;
        size_t slot = rng.below(slots);
        auto s = layout_.scalar_slot(slot);
        ValueType t = layout_.entries[s.entry].value_type;
        double v;
        if (t == ValueType::F64) {
          static const double ext[] = {-std::numeric_limits<double>::infinity(),
                                       std::numeric_limits<double>::infinity(),
                                       0.0,
                                       -1.0,
                                       std::numeric_limits<double>::denorm_min(),
                                       -std::numeric_limits<double>::denorm_min()};
          v = ext[rng.below(6)];
        } else {
          switch (rng.below(4)) {
            case 0: v = static_cast<double>(type_min(t)); break;
            case 1: v = static_cast<double>(type_max(t)); break;
            case 2: v = 0; break;
            default: v = -1; break;
          }
        }
        encode_scalar(bytes.data() + layout_.slot_byte_offset(s), t, v);
        break;
      }
      case 1: {  // fill a span with all ones or all zeros
        size_t len = 1 + rng.below(bytes.size());
        size_t off = rng.below(bytes.size() - len + 1);
        uint8_t fill = rng.chance(0.5) ? 0xff : 0x00;
        std::fill(bytes.begin() + off, bytes.begin() + off + len, fill);
        break;
      }
      case 2: {  // swap two spans
        if (bytes.size() < 2) break;
        size_t len = 1 + rng.below(bytes.size() / 2);
        size_t a = rng.below(bytes.size() - len + 1);
        size_t b = rng.below(bytes.size() - len + 1);
        std::vector<uint8_t> tmp(bytes.begin() + a, bytes.begin() + a + len);
        std::copy(bytes.begin() + b, bytes.begin() + b + len, bytes.begin() + a);
        std::copy(tmp.begin(), tmp.end(), bytes.begin() + b);
        break;
      }
      default: {  // splice a span from another pool entry
        if (pool.empty()) break;
        const TestCase* other = pool[rng.below(pool.size())];
        if (other->bytes.size() != bytes.size() || bytes.empty()) break;
        size_t len = 1 + rng.below(bytes.size());
        size_t off = rng.below(bytes.size() - len + 1);
        std::copy(other->bytes.begin() + off, other->bytes.begin() + off + len,
                  bytes.begin() + off);
        break;
      }
    }
  }
}

void Mutator::mut_square_signal(std::vector<uint8_t>& bytes, Rng& rng) const {
  if (signal_streams_.empty() || bytes.empty()) return;
  const Stream& st = signal_streams_[rng.below(signal_streams_.size())];
  const auto& e = layout_.entries[st.entry];
  const PortDecl& port = model_->ports[e.port_index];
  size_t span = 1 + rng.below(st.length);
  size_t start = rng.below(st.length - span + 1);
  double v = draw_value(port, rng);
  for (size_t i = 0; i < span; ++i) {
    size_t off = e.offset + (start + i) * e.bytes_per_elem + st.channel * type_size(e.value_type);
    encode_scalar(bytes.data() + off, e.value_type, v);
  }
}

void Mutator::mut_curve_signal(std::vector<uint8_t>& bytes, Rng& rng) const {
  if (numeric_streams_.empty() || bytes.empty()) return;
  const Stream& st = numeric_streams_[rng.below(numeric_streams_.size())];
  const auto& e = layout_.entries[st.entry];
  const PortDecl& port = model_->ports[e.port_index];

  int n1 = std::max(0, cfg_.curve_n1), n2 = std::max(0, cfg_.curve_n2);
  std::vector<double> sf(n1 + 1), sp(n1 + 1), cf(n2 + 1), cp(n2 + 1);
  for (int i = 0; i <= n1; ++i) {
    sf[i] = rng.unit() * kTau;
    sp[i] = rng.unit() * kTau;
  }
  for (int j = 0; j <= n2; ++j) {
    cf[j] = rng.unit() * kTau;
    cp[j] = rng.unit() * kTau;
  }
  double x0 = rng.unit() * 100.0;  // random window offset
  double amp = static_cast<double>(n1 + 1 + n2 + 1);

  double lo, hi;
  if (port.has_range()) {
    lo = port.range_min();
    hi = port.range_max();
  } else {
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (size_t i = 0; i < st.length; ++i) {
      size_t off = e.offset + i * e.bytes_per_elem + st.channel * type_size(e.value_type);
      double v = decode_scalar(bytes.data() + off, e.value_type);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo;  // flat stream: write a flat curve
  }

  size_t span = 1 + rng.below(st.length);
  size_t start = rng.below(st.length - span + 1);
  for (size_t i = 0; i < span; ++i) {
    double x = x0 + static_cast<double>(i);
    double raw = 0;
    for (int k = 0; k <= n1; ++k) raw += std::sin(sf[k] * x + sp[k]);
    for (int k = 0; k <= n2; ++k) raw += std::cos(cf[k] * x + cp[k]);
    double v = hi > lo ? lo + (raw + amp) / (2 * amp) * (hi - lo) : lo;
    if (e.value_type != ValueType::F64) v = std::nearbyint(v);
    size_t off = e.offset + (start + i) * e.bytes_per_elem + st.channel * type_size(e.value_type);
    encode_scalar(bytes.data() + off, e.value_type, v);
  }
}

TestCase Mutator::mutate(const TestCase& parent, Rng& rng,
                         const std::vector<const TestCase*>& pool) const {
  TestCase child;
  child.bytes = parent.bytes;
  child.meta.origin = SeedOrigin::Mutation;

  int enabled[6];
  int n_enabled = 0;
  if (cfg_.random_set) enabled[n_enabled++] = 0;
  if (cfg_.bit_flip) enabled[n_enabled++] = 1;
  if (cfg_.math) enabled[n_enabled++] = 2;
  if (cfg_.havoc) enabled[n_enabled++] = 3;
  if (cfg_.square_signal) enabled[n_enabled++] = 4;
  if (cfg_.curve_signal) enabled[n_enabled++] = 5;
  if (n_enabled == 0) return child;

  int lo = std::max(1, cfg_.stack_min);
  int hi = std::max(lo, cfg_.stack_max);
  int stack = lo + static_cast<int>(rng.below(static_cast<uint64_t>(hi - lo + 1)));
  for (int i = 0; i < stack; ++i) {
    switch (enabled[rng.below(static_cast<uint64_t>(n_enabled))]) {
      case 0: mut_random_set(child.bytes, rng); break;
      case 1: mut_bit_flip(child.bytes, rng); break;
      case 2: mut_math(child.bytes, rng); break;
      case 3: mut_havoc(child.bytes, rng, pool); break;
      case 4: mut_square_signal(child.bytes, rng); break;
      case 5: mut_curve_signal(child.bytes, rng); break;
    }
  }
  return child;
}

}  // namespace sigfuzz
