#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigfuzz/ir.hpp"

namespace sigfuzz {

// One entry per input port: where its data lives in the flat test-case buffer.
// Signal ports carry sample_count elements, constant ports exactly one; an
// element is `width` scalars of the port's value type.
struct LayoutEntry {
  std::string port_id;
  int port_index = 0;       // index into ModelIR::ports
  size_t offset = 0;        // byte offset of the first element
  size_t bytes_per_elem = 0;
  size_t elem_count = 0;
  ValueType value_type = ValueType::I32;
  int width = 1;

  size_t byte_size() const { return bytes_per_elem * elem_count; }
};

struct BufferLayout {
  size_t total_bytes = 0;
  std::vector<LayoutEntry> entries;

  const LayoutEntry* find(const std::string& port_id) const;

  // Scalar slots across all entries: (entry, element, channel) triples mapped
  // to a flat index. Used by element-aligned mutation operators.
  struct Slot {
    int entry = 0;
    size_t elem = 0;
    int channel = 0;
  };
  size_t scalar_slot_count() const;
  Slot scalar_slot(size_t index) const;
  size_t slot_byte_offset(const Slot& s) const;
};

BufferLayout layout_test_buffer(const ModelIR& model);

// Little-endian scalar encode/decode at a byte offset. Buffers are never
// rejected: decode clamps to the declared range afterwards (see bind_inputs).
double decode_scalar(const uint8_t* p, ValueType t);
void encode_scalar(uint8_t* p, ValueType t, double value);

double clamp_to_port(const PortDecl& port, double v);

}  // namespace sigfuzz
