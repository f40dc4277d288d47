// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <set>

#include "metadata_internal.hpp"
#include "originlens/errors.hpp"
#include "originlens/metadata.hpp"

namespace originlens {

namespace {

constexpr std::uint16_t kExifIfdPointer = 0x8769;
constexpr std::size_t kMaxIfdChain = 32;

enum TiffType : std::uint16_t {
  kByte = 1, kAscii = 2, kShort = 3, kLong = 4, kRational = 5,
  kSByte = 6, kUndefined = 7, kSShort = 8, kSLong = 9, kSRational = 10,
};

std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case kByte: case kAscii: case kSByte: case kUndefined: return 1;
    case kShort: case kSShort: return 2;
    case kLong: case kSLong: return 4;
    case kRational: case kSRational: return 8;
    default: return 0;
  }
}

const char* tag_name(std::uint16_t tag) {
  switch (tag) {
    case 0x010E: return "ImageDescription";
    case 0x010F: return "Make";
    case 0x0110: return "Model";
    case 0x0112: return "Orientation";
    case 0x0131: return "Software";
    case 0x0132: return "DateTime";
    case 0x013B: return "Artist";
    case 0x8298: return "Copyright";
    case 0x9003: return "DateTimeOriginal";
    case 0x9004: return "DateTimeDigitized";
    case 0x9286: return "UserComment";
    case 0xA420: return "ImageUniqueID";
    default: return nullptr;
  }
}

class TiffReader {
 public:
  explicit TiffReader(ByteView tiff) : data_(tiff) {
    if (tiff.size() < 8) throw MalformedMetadata("TIFF header truncated");
    if (tiff[0] == 'I' && tiff[1] == 'I') {
      little_ = true;
    } else if (tiff[0] == 'M' && tiff[1] == 'M') {
      little_ = false;
    } else {
      throw MalformedMetadata("bad TIFF byte-order mark");
    }
    if (u16(2) != 42) throw MalformedMetadata("bad TIFF magic");
  }

  bool little_endian() const { return little_; }
  std::size_t size() const { return data_.size(); }

  std::uint16_t u16(std::uint64_t at) const {
    check(at, 2);
    return little_ ? static_cast<std::uint16_t>(data_[at] | data_[at + 1] << 8) : read_be16(data_.data() + at);
  }
  std::uint32_t u32(std::uint64_t at) const {
    check(at, 4);
    if (!little_) return read_be32(data_.data() + at);
    return static_cast<std::uint32_t>(data_[at]) | static_cast<std::uint32_t>(data_[at + 1]) << 8 |
           static_cast<std::uint32_t>(data_[at + 2]) << 16 | static_cast<std::uint32_t>(data_[at + 3]) << 24;
  }
  ByteView slice(std::uint64_t at, std::uint64_t len) const {
    check(at, len);
    return data_.subspan(at, len);
  }

 private:
  void check(std::uint64_t at, std::uint64_t len) const {
    if (at > data_.size() || len > data_.size() - at) throw MalformedMetadata("TIFF offset out of range");
  }

  ByteView data_;
  bool little_ = true;
};

std::string ascii_value(ByteView raw) {
  std::string_view s(reinterpret_cast<const char*>(raw.data()), raw.size());
  s = s.substr(0, s.find('\0'));
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return detail::text_or_binary(s);
}

std::string utf16_to_utf8(ByteView raw, bool little) {
  std::string out;
  for (std::size_t i = 0; i + 1 < raw.size(); i += 2) {
    std::uint32_t cp = little ? (raw[i] | raw[i + 1] << 8) : (raw[i] << 8 | raw[i + 1]);
    if (cp == 0) break;
    if (cp >= 0xD800 && cp <= 0xDBFF && i + 3 < raw.size()) {
      std::uint32_t lo = little ? (raw[i + 2] | raw[i + 3] << 8) : (raw[i + 2] << 8 | raw[i + 3]);
      if (lo >= 0xDC00 && lo <= 0xDFFF) {
        cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
        i += 2;
      } else {
        cp = 0xFFFD;
      }
    } else if (cp >= 0xD800 && cp <= 0xDFFF) {
      cp = 0xFFFD;
    }
    detail::append_utf8(out, cp);
  }
  return out;
}

// UserComment carries an 8-byte character-code prefix.
std::string user_comment_value(ByteView raw, bool little) {
  if (raw.size() < 8) return detail::binary_value(raw);
  std::string_view code(reinterpret_cast<const char*>(raw.data()), 8);
  ByteView body = raw.subspan(8);
  if (code == std::string_view("ASCII\0\0\0", 8)) return ascii_value(body);
  if (code == std::string_view("UNICODE\0", 8)) {
    // A UTF-16 BOM overrides the TIFF byte order.
    if (body.size() >= 2 && body[0] == 0xFF && body[1] == 0xFE) return utf16_to_utf8(body.subspan(2), true);
    if (body.size() >= 2 && body[0] == 0xFE && body[1] == 0xFF) return utf16_to_utf8(body.subspan(2), false);
    return utf16_to_utf8(body, little);
  }
  if (code == std::string_view("\0\0\0\0\0\0\0\0", 8)) return ascii_value(body);
  return detail::binary_value(raw);
}

std::string numeric_value(const TiffReader& r, std::uint16_t type, std::uint32_t count, std::uint64_t at) {
  std::string out;
  const std::uint32_t shown = std::min<std::uint32_t>(count, 16);
  for (std::uint32_t i = 0; i < shown; ++i) {
    if (!out.empty()) out += ' ';
    switch (type) {
      case kShort: out += std::to_string(r.u16(at + 2ull * i)); break;
      case kSShort: out += std::to_string(static_cast<std::int16_t>(r.u16(at + 2ull * i))); break;
      case kLong: out += std::to_string(r.u32(at + 4ull * i)); break;
      case kSLong: out += std::to_string(static_cast<std::int32_t>(r.u32(at + 4ull * i))); break;
      case kRational:
        out += std::to_string(r.u32(at + 8ull * i)) + "/" + std::to_string(r.u32(at + 8ull * i + 4));
        break;
      case kSRational:
        out += std::to_string(static_cast<std::int32_t>(r.u32(at + 8ull * i))) + "/" +
               std::to_string(static_cast<std::int32_t>(r.u32(at + 8ull * i + 4)));
        break;
      default: out += std::to_string(r.slice(at + i, 1)[0]); break;
    }
  }
  return out;
}

struct IfdWalk {
  const TiffReader& reader;
  std::set<std::uint32_t> visited;
  MetadataRecordSet records;

  // Returns the next-IFD offset.
  std::uint32_t read_ifd(std::uint32_t offset, bool emit, std::uint32_t* exif_ifd) {
    if (!visited.insert(offset).second) throw MalformedMetadata("IFD offset loop");
    const std::uint16_t n = reader.u16(offset);
    const std::uint64_t entries = offset + 2ull;
    reader.slice(entries, 12ull * n + 4);
    for (std::uint16_t i = 0; i < n; ++i) {
      const std::uint64_t e = entries + 12ull * i;
      const std::uint16_t tag = reader.u16(e);
      const std::uint16_t type = reader.u16(e + 2);
      const std::uint32_t count = reader.u32(e + 4);
      if (tag == kExifIfdPointer && exif_ifd) {
        *exif_ifd = reader.u32(e + 8);
        continue;
      }
      const char* name = emit ? tag_name(tag) : nullptr;
      const std::size_t unit = type_size(type);
      if (!name || unit == 0) continue;
      const std::uint64_t bytes = static_cast<std::uint64_t>(unit) * count;
      const std::uint64_t at = bytes <= 4 ? e + 8 : reader.u32(e + 8);
      ByteView raw = reader.slice(at, bytes);
      std::string value;
      if (tag == 0x9286) {
        value = user_comment_value(raw, reader.little_endian());
      } else if (type == kAscii) {
        value = ascii_value(raw);
      } else if (type == kUndefined || type == kByte || type == kSByte) {
        value = type == kUndefined ? detail::binary_value(raw) : numeric_value(reader, type, count, at);
      } else {
        value = numeric_value(reader, type, count, at);
      }
      records.push_back({MetadataSource::Exif, name, std::move(value)});
    }
    return reader.u32(entries + 12ull * n);
  }
};

}  // namespace

MetadataRecordSet parse_tiff_metadata(ByteView tiff) {
  TiffReader reader(tiff);
  IfdWalk walk{reader, {}, {}};
  std::uint32_t exif_ifd = 0;
  std::uint32_t next = walk.read_ifd(reader.u32(4), true, &exif_ifd);
  // Later IFDs (thumbnails) are walked for loop detection only.
  for (std::size_t hops = 0; next != 0; ++hops) {
    if (hops >= kMaxIfdChain) throw MalformedMetadata("IFD chain too long");
    next = walk.read_ifd(next, false, nullptr);
  }
  if (exif_ifd != 0) {
    std::uint32_t sub_next = walk.read_ifd(exif_ifd, true, nullptr);
    (void)sub_next;
  }
  return std::move(walk.records);
}

MetadataRecordSet parse_exif(ByteView app1_payload) {
  static constexpr std::string_view kExifId("Exif\0\0", 6);
  if (app1_payload.size() < kExifId.size() ||
      std::memcmp(app1_payload.data(), kExifId.data(), kExifId.size()) != 0) {
    throw MalformedMetadata("missing Exif identifier");
  }
  return parse_tiff_metadata(app1_payload.subspan(kExifId.size()));
}

}  // namespace originlens
