// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/cbor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "originlens/errors.hpp"

namespace originlens::cbor {

namespace {

constexpr int kMaxDepth = 64;

enum Major : std::uint8_t {
  kUnsigned = 0,
  kNegative = 1,
  kByteString = 2,
  kTextString = 3,
  kArray = 4,
  kMap = 5,
  kTag = 6,
  kSimple = 7,
};

void write_head(Bytes& out, std::uint8_t major, std::uint64_t arg) {
  const auto m = static_cast<std::uint8_t>(major << 5);
  if (arg < 24) {
    out.push_back(static_cast<std::uint8_t>(m | arg));
  } else if (arg <= 0xFF) {
    out.push_back(m | 24);
    out.push_back(static_cast<std::uint8_t>(arg));
  } else if (arg <= 0xFFFF) {
    out.push_back(m | 25);
    append_be16(out, static_cast<std::uint16_t>(arg));
  } else if (arg <= 0xFFFFFFFFu) {
    out.push_back(m | 26);
    append_be32(out, static_cast<std::uint32_t>(arg));
  } else {
    out.push_back(m | 27);
    append_be64(out, arg);
  }
}

// Half-precision bits when `f` converts exactly; normal numbers, zeros,
// infinities and NaN only.
std::optional<std::uint16_t> to_half_exact(float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  const std::uint16_t sign = static_cast<std::uint16_t>((bits >> 16) & 0x8000);
  const int exp = static_cast<int>((bits >> 23) & 0xFF);
  const std::uint32_t mant = bits & 0x7FFFFF;
  if (exp == 0 && mant == 0) return sign;
  if (exp == 0xFF) return static_cast<std::uint16_t>(sign | 0x7C00 | (mant ? 0x0200 : 0));
  const int half_exp = exp - 127 + 15;
  if (half_exp <= 0) {
    // Half subnormals are m * 2^-24 with m < 1024.
    const float scaled = std::ldexp(std::fabs(f), 24);
    if (scaled >= 1024.0f || scaled != std::floor(scaled)) return std::nullopt;
    return static_cast<std::uint16_t>(sign | static_cast<std::uint16_t>(scaled));
  }
  if (half_exp >= 31 || (mant & 0x1FFF) != 0) return std::nullopt;
  return static_cast<std::uint16_t>(sign | (half_exp << 10) | (mant >> 13));
}

double half_to_double(std::uint16_t h) {
  const int exp = (h >> 10) & 0x1F;
  const int mant = h & 0x3FF;
  double v;
  if (exp == 0) {
    v = std::ldexp(mant, -24);
  } else if (exp == 31) {
    v = mant == 0 ? INFINITY : NAN;
  } else {
    v = std::ldexp(mant + 1024, exp - 25);
  }
  return (h & 0x8000) ? -v : v;
}

void encode_into(Bytes& out, const Value& value, int depth) {
  if (depth > kMaxDepth) throw CborError("CBOR value nested too deeply");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          out.push_back(0xF6);
        } else if constexpr (std::is_same_v<T, bool>) {
          out.push_back(v ? 0xF5 : 0xF4);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          write_head(out, kUnsigned, v);
        } else if constexpr (std::is_same_v<T, Negative>) {
          write_head(out, kNegative, v.magnitude);
        } else if constexpr (std::is_same_v<T, double>) {
          const auto f = static_cast<float>(v);
          if (static_cast<double>(f) == v || std::isnan(v)) {
            if (auto h = to_half_exact(f)) {
              out.push_back(0xF9);
              append_be16(out, *h);
            } else {
              out.push_back(0xFA);
              append_be32(out, std::bit_cast<std::uint32_t>(f));
            }
          } else {
            out.push_back(0xFB);
            append_be64(out, std::bit_cast<std::uint64_t>(v));
          }
        } else if constexpr (std::is_same_v<T, Bytes>) {
          write_head(out, kByteString, v.size());
          out.insert(out.end(), v.begin(), v.end());
        } else if constexpr (std::is_same_v<T, std::string>) {
          write_head(out, kTextString, v.size());
          out.insert(out.end(), v.begin(), v.end());
        } else if constexpr (std::is_same_v<T, Value::Array>) {
          write_head(out, kArray, v.size());
          for (const auto& item : v) encode_into(out, item, depth + 1);
        } else if constexpr (std::is_same_v<T, Value::Map>) {
          std::vector<std::pair<Bytes, const Value*>> entries;
          entries.reserve(v.size());
          for (const auto& [k, val] : v) {
            Bytes key;
            encode_into(key, k, depth + 1);
            entries.emplace_back(std::move(key), &val);
          }
          std::sort(entries.begin(), entries.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
          for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].first == entries[i - 1].first) throw CborError("duplicate CBOR map key");
          }
          write_head(out, kMap, v.size());
          for (const auto& [key, val] : entries) {
            out.insert(out.end(), key.begin(), key.end());
            encode_into(out, *val, depth + 1);
          }
        }
      },
      value.storage());
}

struct Decoder {
  ByteView data;
  std::size_t pos = 0;

  std::size_t remaining() const { return data.size() - pos; }

  void need(std::size_t n) const {
    if (remaining() < n) throw CborError("truncated CBOR item");
  }

  std::uint64_t read_arg(std::uint8_t info) {
    if (info < 24) return info;
    switch (info) {
      case 24:
        need(1);
        return data[pos++];
      case 25: {
        need(2);
        auto v = read_be16(data.data() + pos);
        pos += 2;
        return v;
      }
      case 26: {
        need(4);
        auto v = read_be32(data.data() + pos);
        pos += 4;
        return v;
      }
      case 27: {
        need(8);
        auto v = read_be64(data.data() + pos);
        pos += 8;
        return v;
      }
      case 31:
        throw CborError("indefinite-length items are not supported");
      default:
        throw CborError("reserved additional-information value");
    }
  }

  Value item(int depth) {
    if (depth > kMaxDepth) throw CborError("CBOR value nested too deeply");
    need(1);
    const std::uint8_t initial = data[pos++];
    const auto major = static_cast<std::uint8_t>(initial >> 5);
    const auto info = static_cast<std::uint8_t>(initial & 0x1F);
    if (major == kSimple) return simple(info);
    const std::uint64_t arg = read_arg(info);
    switch (major) {
      case kUnsigned:
        return Value(arg);
      case kNegative:
        return Value(Negative{arg});
      case kByteString: {
        need_length(arg);
        Bytes b(data.begin() + static_cast<std::ptrdiff_t>(pos),
                data.begin() + static_cast<std::ptrdiff_t>(pos + arg));
        pos += static_cast<std::size_t>(arg);
        return Value(std::move(b));
      }
      case kTextString: {
        need_length(arg);
        std::string s(reinterpret_cast<const char*>(data.data() + pos), static_cast<std::size_t>(arg));
        pos += static_cast<std::size_t>(arg);
        if (sanitize_utf8(s) != s) throw CborError("text string is not valid UTF-8");
        return Value(std::move(s));
      }
      case kArray: {
        need_length(arg);  // every element takes at least one byte
        Value::Array a;
        a.reserve(static_cast<std::size_t>(arg));
        for (std::uint64_t i = 0; i < arg; ++i) a.push_back(item(depth + 1));
        return Value(std::move(a));
      }
      case kMap: {
        if (arg > remaining() / 2) throw CborError("truncated CBOR map");
        Value::Map m;
        m.reserve(static_cast<std::size_t>(arg));
        for (std::uint64_t i = 0; i < arg; ++i) {
          Value k = item(depth + 1);
          Value v = item(depth + 1);
          m.emplace_back(std::move(k), std::move(v));
        }
        return Value(std::move(m));
      }
      case kTag:
        return item(depth + 1);
      default:
        break;
    }
    throw CborError("unreachable major type");
  }

  void need_length(std::uint64_t n) const {
    if (n > remaining()) throw CborError("CBOR length overruns input");
  }

  Value simple(std::uint8_t info) {
    switch (info) {
      case 20:
        return Value(false);
      case 21:
        return Value(true);
      case 22:
      case 23:
        return Value(nullptr);
      case 25: {
        need(2);
        auto h = read_be16(data.data() + pos);
        pos += 2;
        return Value(half_to_double(h));
      }
      case 26: {
        need(4);
        auto f = std::bit_cast<float>(read_be32(data.data() + pos));
        pos += 4;
        return Value(static_cast<double>(f));
      }
      case 27: {
        need(8);
        auto d = std::bit_cast<double>(read_be64(data.data() + pos));
        pos += 8;
        return Value(d);
      }
      default:
        throw CborError("unsupported CBOR simple value");
    }
  }
};

}  // namespace

Value::Value(std::int64_t i) {
  if (i >= 0) {
    v_ = static_cast<std::uint64_t>(i);
  } else {
    v_ = Negative{static_cast<std::uint64_t>(-(i + 1))};
  }
}

Value Value::object(std::initializer_list<std::pair<std::string, Value>> entries) {
  Map m;
  m.reserve(entries.size());
  for (const auto& [k, v] : entries) m.emplace_back(Value(k), v);
  return Value(std::move(m));
}

const Value* Value::find(std::string_view key) const {
  const Map* m = map();
  if (!m) return nullptr;
  for (const auto& [k, v] : *m) {
    if (const auto* t = k.text(); t && *t == key) return &v;
  }
  return nullptr;
}

Bytes encode(const Value& value) {
  Bytes out;
  encode_into(out, value, 0);
  return out;
}

Value decode(ByteView bytes) {
  Decoder d{bytes};
  Value v = d.item(0);
  if (d.pos != bytes.size()) throw CborError("trailing bytes after CBOR item");
  return v;
}

}  // namespace originlens::cbor
