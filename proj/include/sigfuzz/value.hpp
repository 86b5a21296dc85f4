#pragma once

#include <cstdint>
#include <cstring>
#include <limits>
#include <string>

namespace sigfuzz {

enum class ValueType : uint8_t { Bool, I8, I16, I32, F64 };

inline const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::Bool: return "bool";
    case ValueType::I8: return "int8";
    case ValueType::I16: return "int16";
    case ValueType::I32: return "int32";
    case ValueType::F64: return "float64";
  }
  return "?";
}

inline bool is_integer(ValueType t) {
  return t == ValueType::I8 || t == ValueType::I16 || t == ValueType::I32;
}
inline bool is_numeric(ValueType t) { return t != ValueType::Bool; }

inline size_t type_size(ValueType t) {
  switch (t) {
    case ValueType::Bool: return 1;
    case ValueType::I8: return 1;
    case ValueType::I16: return 2;
    case ValueType::I32: return 4;
    case ValueType::F64: return 8;
  }
  return 0;
}

inline int64_t type_min(ValueType t) {
  switch (t) {
    case ValueType::Bool: return 0;
    case ValueType::I8: return INT8_MIN;
    case ValueType::I16: return INT16_MIN;
    case ValueType::I32: return INT32_MIN;
    default: return INT64_MIN;
  }
}
inline int64_t type_max(ValueType t) {
  switch (t) {
    case ValueType::Bool: return 1;
    case ValueType::I8: return INT8_MAX;
    case ValueType::I16: return INT16_MAX;
    case ValueType::I32: return INT32_MAX;
    default: return INT64_MAX;
  }
}

// Two's-complement wrap of a 64-bit intermediate to the declared width.
inline int64_t wrap_to(ValueType t, int64_t v) {
  switch (t) {
    case ValueType::I8: return static_cast<int8_t>(static_cast<uint64_t>(v));
    case ValueType::I16: return static_cast<int16_t>(static_cast<uint64_t>(v));
    case ValueType::I32: return static_cast<int32_t>(static_cast<uint64_t>(v));
    case ValueType::Bool: return v != 0 ? 1 : 0;
    default: return v;
  }
}

// Runtime value: bool and integers share the int slot.
struct Value {
  ValueType type = ValueType::I32;
  int64_t i = 0;
  double f = 0.0;

  static Value of_bool(bool b) { return Value{ValueType::Bool, b ? 1 : 0, 0.0}; }
  static Value of_int(ValueType t, int64_t v) { return Value{t, wrap_to(t, v), 0.0}; }
  static Value of_double(double d) { return Value{ValueType::F64, 0, d}; }

  bool as_bool() const { return type == ValueType::F64 ? f != 0.0 : i != 0; }
  double as_double() const { return type == ValueType::F64 ? f : static_cast<double>(i); }
  int64_t as_int() const { return type == ValueType::F64 ? double_to_int(f) : i; }

  // Deterministic float-to-int conversion: truncate toward zero, NaN -> 0,
  // out-of-range saturates at int64 before wrapping.
  static int64_t double_to_int(double d) {
    if (d != d) return 0;
    if (d >= 9.2233720368547758e18) return INT64_MAX;
    if (d <= -9.2233720368547758e18) return INT64_MIN;
    return static_cast<int64_t>(d);
  }

  bool bits_equal(const Value& o) const {
    if (type != o.type) return false;
    if (type == ValueType::F64) {
      uint64_t a, b;
      std::memcpy(&a, &f, 8);
      std::memcpy(&b, &o.f, 8);
      return a == b;
    }
    return i == o.i;
  }

  std::string to_string() const;
};

// Coerce a value to the target type with wrapping / truncation semantics.
inline Value coerce(ValueType target, const Value& v) {
  if (target == ValueType::F64) return Value::of_double(v.as_double());
  if (target == ValueType::Bool) return Value::of_bool(v.as_bool());
  return Value::of_int(target, v.as_int());
}

}  // namespace sigfuzz
