#include "sigfuzz/layout.hpp"

#include <cmath>
#include <cstring>

namespace sigfuzz {

const LayoutEntry* BufferLayout::find(const std::string& port_id) const {
  for (const auto& e : entries)
    if (e.port_id == port_id) return &e;
  return nullptr;
}

size_t BufferLayout::scalar_slot_count() const {
  size_t n = 0;
  for (const auto& e : entries) n += e.elem_count * e.width;
  return n;
}

BufferLayout::Slot BufferLayout::scalar_slot(size_t index) const {
  for (size_t i = 0; i < entries.size(); ++i) {
    size_t n = entries[i].elem_count * entries[i].width;
    if (index < n)
      return Slot{static_cast<int>(i), index / entries[i].width,
                  static_cast<int>(index % entries[i].width)};
    index -= n;
  }
  return Slot{};
}

size_t BufferLayout::slot_byte_offset(const Slot& s) const {
  const auto& e = entries[s.entry];
  return e.offset + s.elem * e.bytes_per_elem + s.channel * type_size(e.value_type);
}

BufferLayout layout_test_buffer(const ModelIR& model) {
  BufferLayout layout;
  size_t offset = 0;
  for (size_t i = 0; i < model.ports.size(); ++i) {
    const auto& p = model.ports[i];
    if (p.direction != PortDirection::In) continue;
    LayoutEntry e;
    e.port_id = p.id;
    e.port_index = static_cast<int>(i);
    e.offset = offset;
    e.bytes_per_elem = type_size(p.value_type) * p.width;
    e.elem_count = p.kind == PortKind::Signal ? static_cast<size_t>(model.sample_count) : 1;
    e.value_type = p.value_type;
    e.width = p.width;
    offset += e.byte_size();
    layout.entries.push_back(std::move(e));
  }
  layout.total_bytes = offset;
  return layout;
}

double decode_scalar(const uint8_t* p, ValueType t) {
  switch (t) {
    case ValueType::Bool:
      return *p != 0 ? 1.0 : 0.0;
    case ValueType::I8:
      return static_cast<int8_t>(*p);
    case ValueType::I16: {
      uint16_t v = static_cast<uint16_t>(p[0]) | static_cast<uint16_t>(p[1]) << 8;
      return static_cast<int16_t>(v);
    }
    case ValueType::I32: {
      uint32_t v = 0;
      for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
      return static_cast<int32_t>(v);
    }
    case ValueType::F64: {
      uint64_t v = 0;
      for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
      double d;
      std::memcpy(&d, &v, 8);
      return d;
    }
  }
  return 0.0;
}

void encode_scalar(uint8_t* p, ValueType t, double value) {
  switch (t) {
    case ValueType::Bool:
      *p = value != 0.0 ? 1 : 0;
      break;
    case ValueType::I8:
      *p = static_cast<uint8_t>(static_cast<int8_t>(Value::double_to_int(value)));
      break;
    case ValueType::I16: {
      uint16_t v = static_cast<uint16_t>(static_cast<int16_t>(Value::double_to_int(value)));
      p[0] = v & 0xff;
      p[1] = v >> 8;
      break;
    }
    case ValueType::I32: {
      uint32_t v = static_cast<uint32_t>(static_cast<int32_t>(Value::double_to_int(value)));
      for (int i = 0; i < 4; ++i) p[i] = (v >> (8 * i)) & 0xff;
      break;
    }
    case ValueType::F64: {
      uint64_t v;
      std::memcpy(&v, &value, 8);
      for (int i = 0; i < 8; ++i) p[i] = (v >> (8 * i)) & 0xff;
      break;
    }
  }
}

double clamp_to_port(const PortDecl& port, double v) {
  if (port.value_type == ValueType::F64 && v != v) v = 0.0;  // NaN is never in range
  double lo = port.range_min();
  double hi = port.range_max();
  if (v < lo) return lo;
  if (v > hi) return hi;
  return v;
}

}  // namespace sigfuzz
