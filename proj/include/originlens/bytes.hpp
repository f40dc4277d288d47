// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace originlens {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Half-open byte range [offset, offset + length) within a file.
struct ByteRange {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  std::uint64_t end() const { return offset + length; }
  auto operator<=>(const ByteRange&) const = default;
};

/// SHA-256 output. The array type pins the length to exactly 32 bytes.
using Digest256 = std::array<std::uint8_t, 32>;

std::string to_hex(ByteView bytes);
std::string to_hex(const Digest256& digest);
std::optional<Bytes> from_hex(std::string_view hex);
std::optional<Digest256> digest_from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string to_string(ByteView bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

// Big-endian helpers. Callers bounds-check before reading.
inline std::uint16_t read_be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}
inline std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}
inline std::uint64_t read_be64(const std::uint8_t* p) {
  return (std::uint64_t{read_be32(p)} << 32) | read_be32(p + 4);
}
void append_be16(Bytes& out, std::uint16_t v);
void append_be32(Bytes& out, std::uint32_t v);
void append_be64(Bytes& out, std::uint64_t v);

/// Replaces ill-formed UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view s);
std::string latin1_to_utf8(std::string_view s);

}  // namespace originlens
