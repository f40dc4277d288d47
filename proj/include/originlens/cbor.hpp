// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal CBOR (RFC 8949) with deterministic encoding: shortest-form
// integers and lengths, definite lengths only, map keys sorted by their
// encoded bytes.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "originlens/bytes.hpp"

namespace originlens::cbor {

/// A negative integer stored as -1 - magnitude.
struct Negative {
  std::uint64_t magnitude = 0;
  bool operator==(const Negative&) const = default;
};

class Value {
 public:
  using Array = std::vector<Value>;
  using Map = std::vector<std::pair<Value, Value>>;
  using Storage =
      std::variant<std::nullptr_t, bool, std::uint64_t, Negative, double, Bytes, std::string, Array, Map>;

  Value() : v_(nullptr) {}
  Value(std::nullptr_t) : v_(nullptr) {}
  Value(bool b) : v_(b) {}
  Value(std::uint64_t u) : v_(u) {}
  Value(unsigned u) : v_(std::uint64_t{u}) {}
  Value(Negative n) : v_(n) {}
  Value(int i) : Value(static_cast<std::int64_t>(i)) {}
  Value(std::int64_t i);
  Value(double d) : v_(d) {}
  Value(Bytes b) : v_(std::move(b)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(Array a) : v_(std::move(a)) {}
  Value(Map m) : v_(std::move(m)) {}

  /// Map builder with text keys.
  static Value object(std::initializer_list<std::pair<std::string, Value>> entries);

  const Storage& storage() const { return v_; }

  template <typename T>
  const T* get() const {
    return std::get_if<T>(&v_);
  }
  const std::string* text() const { return get<std::string>(); }
  const Bytes* bytes() const { return get<Bytes>(); }
  const Array* array() const { return get<Array>(); }
  const Map* map() const { return get<Map>(); }
  const std::uint64_t* uint() const { return get<std::uint64_t>(); }
  bool is_null() const { return std::holds_alternative<std::nullptr_t>(v_); }

  /// Map lookup by text key; nullptr when absent or not a map.
  const Value* find(std::string_view key) const;

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }

 private:
  Storage v_;
};

/// Throws CborError on duplicate map keys.
Bytes encode(const Value& value);

/// Decodes exactly one data item spanning all of `bytes`. Tags are accepted
/// and dropped. Throws CborError.
Value decode(ByteView bytes);

}  // namespace originlens::cbor
