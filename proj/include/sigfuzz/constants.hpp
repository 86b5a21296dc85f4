#pragma once

#include <map>
#include <set>
#include <vector>

#include "sigfuzz/ir.hpp"

namespace sigfuzz {

// Literal values mined from a model, grouped by value type, each enriched
// with its +/-1 neighbors for boundary probing.
class ConstantDictionary {
 public:
  void add_int(ValueType t, int64_t v);
  void add_float(double v);

  const std::set<int64_t>& ints(ValueType t) const;
  const std::set<double>& floats() const { return floats_; }
  bool empty() const;

  // Flattened candidates for a port of the given type: the type's own bucket
  // plus any integer literals representable in it. Handy for mutators.
  std::vector<double> values_for(ValueType t) const;

 private:
  std::map<ValueType, std::set<int64_t>> int_buckets_;
  std::set<double> floats_;
};

ConstantDictionary mine_constants(const ModelIR& model);

}  // namespace sigfuzz
