#pragma once

#include <cstdint>
#include <vector>

#include "sigfuzz/constants.hpp"
#include "sigfuzz/exec.hpp"
#include "sigfuzz/layout.hpp"
#include "sigfuzz/rng.hpp"

namespace sigfuzz {

struct MutationConfig {
  bool random_set = true;
  bool bit_flip = true;
  bool math = true;
  bool havoc = true;
  bool square_signal = true;
  bool curve_signal = true;
  int math_max = 16;
  int curve_n1 = 2;
  int curve_n2 = 2;
  int mutations_per_seed = 256;
  int stack_min = 1;
  int stack_max = 8;

  bool any_enabled() const {
    return random_set || bit_flip || math || havoc || square_signal || curve_signal;
  }
};

// All operators preserve buffer length and keep positions aligned to port
// elements where the operator is value-based. Signal operators touch one
// port's stream at a time.
class Mutator {
 public:
  Mutator(const ModelIR& model, const BufferLayout& layout, const ConstantDictionary& dict,
          MutationConfig cfg);

  void mut_random_set(std::vector<uint8_t>& bytes, Rng& rng) const;
  void mut_bit_flip(std::vector<uint8_t>& bytes, Rng& rng) const;
  std::vector<std::vector<uint8_t>> deterministic_bit_flips(const std::vector<uint8_t>& b) const;
  void mut_math(std::vector<uint8_t>& bytes, Rng& rng) const;
  void mut_havoc(std::vector<uint8_t>& bytes, Rng& rng,
                 const std::vector<const TestCase*>& pool) const;
  void mut_square_signal(std::vector<uint8_t>& bytes, Rng& rng) const;
  void mut_curve_signal(std::vector<uint8_t>& bytes, Rng& rng) const;

  // Random stack of 1..8 enabled operators.
  TestCase mutate(const TestCase& parent, Rng& rng,
                  const std::vector<const TestCase*>& pool) const;

  const MutationConfig& config() const { return cfg_; }

 private:
  struct Stream {  // one channel of one signal port
    int entry;
    int channel;
    size_t length;  // elements
  };

  double draw_value(const PortDecl& port, Rng& rng) const;
  size_t slot_offset(size_t slot) const { return layout_.slot_byte_offset(layout_.scalar_slot(slot)); }
  const PortDecl& slot_port(size_t slot) const;

  const ModelIR* model_;
  BufferLayout layout_;
  MutationConfig cfg_;
  std::vector<std::vector<double>> mined_;  // indexed by ValueType
  std::vector<size_t> numeric_slots_;       // scalar slots of non-bool ports
  std::vector<Stream> signal_streams_;
  std::vector<Stream> numeric_streams_;
};

}  // namespace sigfuzz
