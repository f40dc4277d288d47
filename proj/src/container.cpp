// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <stdexcept>

#include "originlens/errors.hpp"

namespace originlens {

namespace {

constexpr std::size_t kApp11PrefixSize = 8;  // "JP", En, Z
constexpr std::size_t kBoxHeaderSize = 8;

bool is_app_or_com(std::uint8_t marker) {
  return (marker >= 0xE0 && marker <= 0xEF) || marker == jpeg::kCom;
}

bool is_standalone(std::uint8_t marker) {
  return (marker >= 0xD0 && marker <= 0xD7) || marker == 0x01;
}

// An APP11 payload shaped like a JUMBF carrier: common identifier "JP" and a
// "jumb" superbox header right after the 8-byte prefix.
bool is_jumbf_app11(const Segment& s) {
  const auto& p = s.payload;
  return s.marker == jpeg::kApp11 && p.size() >= kApp11PrefixSize + kBoxHeaderSize && p[0] == 'J' &&
         p[1] == 'P' && std::memcmp(p.data() + 12, "jumb", 4) == 0;
}

// Reads the description-box label of a reassembled superbox, if present.
std::optional<std::string> peek_store_label(const Bytes& jumbf) {
  std::size_t pos = kBoxHeaderSize;
  if (jumbf.size() >= 8 && read_be32(jumbf.data()) == 1) pos += 8;
  if (jumbf.size() < pos + 8 + 17) return std::nullopt;
  if (std::memcmp(jumbf.data() + pos + 4, "jumd", 4) != 0) return std::nullopt;
  std::uint8_t toggles = jumbf[pos + 8 + 16];
  if ((toggles & 0x02) == 0) return std::nullopt;
  std::size_t start = pos + 8 + 17;
  auto end = std::find(jumbf.begin() + static_cast<std::ptrdiff_t>(start), jumbf.end(), 0);
  if (end == jumbf.end()) return std::nullopt;
  return std::string(jumbf.begin() + static_cast<std::ptrdiff_t>(start), end);
}

std::optional<JumbfCarrier> assemble_app11(const std::vector<Segment>& segments) {
  std::map<std::uint16_t, std::vector<const Segment*>> groups;
  std::vector<std::uint16_t> group_order;
  for (const auto& s : segments) {
    if (!is_jumbf_app11(s)) continue;
    auto instance = read_be16(s.payload.data() + 2);
    auto [it, inserted] = groups.try_emplace(instance);
    if (inserted) group_order.push_back(instance);
    it->second.push_back(&s);
  }
  if (groups.empty()) return std::nullopt;

  std::optional<JumbfCarrier> fallback;
  for (auto instance : group_order) {
    auto parts = groups[instance];
    std::sort(parts.begin(), parts.end(), [](const Segment* a, const Segment* b) {
      return read_be32(a->payload.data() + 4) < read_be32(b->payload.data() + 4);
    });
    JumbfCarrier carrier;
    const std::uint8_t* header = parts.front()->payload.data() + kApp11PrefixSize;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& p = parts[i]->payload;
      auto seq = read_be32(p.data() + 4);
      if (seq != i + 1) {
        if (i > 0 && seq == read_be32(parts[i - 1]->payload.data() + 4)) {
          throw MalformedContainer("duplicated APP11 sequence number " + std::to_string(seq));
        }
        throw MalformedContainer("APP11 sequence gap: expected " + std::to_string(i + 1) + ", found " +
                                 std::to_string(seq));
      }
      std::size_t skip = kApp11PrefixSize;
      if (i > 0) {
        if (std::memcmp(p.data() + kApp11PrefixSize, header, kBoxHeaderSize) != 0) {
          throw MalformedContainer("APP11 continuation repeats a different box header");
        }
        skip += kBoxHeaderSize;
      }
      if (carrier.jumbf.size() + (p.size() - skip) > kMaxJumbfSize) {
        throw MalformedContainer("reassembled JUMBF exceeds 64 MiB");
      }
      carrier.jumbf.insert(carrier.jumbf.end(), p.begin() + static_cast<std::ptrdiff_t>(skip), p.end());
      carrier.covered_ranges.push_back(parts[i]->total_range);
    }
    std::sort(carrier.covered_ranges.begin(), carrier.covered_ranges.end());
    if (peek_store_label(carrier.jumbf) == "c2pa") return carrier;
    if (!fallback) fallback = std::move(carrier);
  }
  return fallback;
}

}  // namespace

const char* to_string(ImageFormat format) {
  switch (format) {
    case ImageFormat::Jpeg:
      return "jpeg";
    case ImageFormat::Png:
      return "png";
    case ImageFormat::Unknown:
      break;
  }
  return "unknown";
}

ImageFormat detect_format(ByteView bytes) {
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == jpeg::kSoi) return ImageFormat::Jpeg;
  if (bytes.size() >= png::kSignature.size() &&
      std::equal(png::kSignature.begin(), png::kSignature.end(), bytes.begin())) {
    return ImageFormat::Png;
  }
  return ImageFormat::Unknown;
}

ImageBytes::ImageBytes(Bytes bytes)
    : data_(std::make_shared<const Bytes>(std::move(bytes))), format_(detect_format(this->bytes())) {}

std::uint32_t png::crc32(ByteView type_and_payload) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in pieces for very large payloads.
  std::size_t pos = 0;
  while (pos < type_and_payload.size()) {
    auto n = static_cast<uInt>(std::min<std::size_t>(type_and_payload.size() - pos, 1u << 30));
    crc = ::crc32(crc, type_and_payload.data() + pos, n);
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<Segment> scan_jpeg_segments(const ImageBytes& image) {
  if (image.format() != ImageFormat::Jpeg) throw MalformedContainer("not a JPEG stream");
  auto data = image.bytes();
  const std::size_t size = data.size();
  std::vector<Segment> segments;
  std::size_t pos = 2;
  while (true) {
    if (pos >= size) throw MalformedContainer("end of file before start-of-scan");
    if (data[pos] != 0xFF) {
      throw MalformedContainer("marker byte absent at offset " + std::to_string(pos));
    }
    while (pos < size && data[pos] == 0xFF) ++pos;  // fill bytes
    if (pos >= size) throw MalformedContainer("end of file inside marker");
    const std::uint8_t marker = data[pos];
    const std::size_t marker_offset = pos - 1;
    ++pos;
    if (marker == jpeg::kSos || marker == jpeg::kEoi) break;
    if (is_standalone(marker)) continue;
    if (marker == 0x00 || marker == jpeg::kSoi) {
      throw MalformedContainer("unexpected marker at offset " + std::to_string(marker_offset));
    }
    if (size - pos < 2) throw MalformedContainer("truncated segment length");
    const std::size_t declared = read_be16(data.data() + pos);
    if (declared < 2) throw MalformedContainer("segment length below 2");
    if (declared > size - pos) {
      throw MalformedContainer("segment at offset " + std::to_string(marker_offset) + " overruns the file");
    }
    if (is_app_or_com(marker)) {
      Segment s;
      s.marker = marker;
      s.file_offset = marker_offset;
      s.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(pos + 2),
                       data.begin() + static_cast<std::ptrdiff_t>(pos + declared));
      s.total_range = {marker_offset, pos + declared - marker_offset};
      segments.push_back(std::move(s));
    }
    pos += declared;
  }
  return segments;
}

std::vector<Chunk> scan_png_chunks(const ImageBytes& image) {
  if (image.format() != ImageFormat::Png) throw MalformedContainer("not a PNG stream");
  auto data = image.bytes();
  const std::size_t size = data.size();
  std::vector<Chunk> chunks;
  std::size_t pos = png::kSignature.size();
  while (true) {
    if (size - pos < 12) {
      throw MalformedContainer(pos == size ? "missing IEND chunk" : "truncated chunk header");
    }
    const std::uint32_t length = read_be32(data.data() + pos);
    if (length > 0x7FFFFFFFu) throw MalformedContainer("chunk length exceeds 2^31-1");
    for (std::size_t i = 0; i < 4; ++i) {
      auto c = data[pos + 4 + i];
      if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))) {
        throw MalformedContainer("invalid chunk type at offset " + std::to_string(pos));
      }
    }
    if (size - pos - 12 < length) throw MalformedContainer("truncated chunk at offset " + std::to_string(pos));
    Chunk c;
    c.type_code.assign(reinterpret_cast<const char*>(data.data() + pos + 4), 4);
    c.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(pos + 8),
                     data.begin() + static_cast<std::ptrdiff_t>(pos + 8 + length));
    const std::uint32_t stored_crc = read_be32(data.data() + pos + 8 + length);
    c.crc_valid = stored_crc == png::crc32(data.subspan(pos + 4, 4 + std::size_t{length}));
    c.total_range = {pos, 12 + std::uint64_t{length}};
    pos += 12 + std::size_t{length};
    const bool end = c.type_code == "IEND";
    chunks.push_back(std::move(c));
    if (end) break;
  }
  return chunks;
}

std::optional<JumbfCarrier> extract_jumbf(const ImageBytes& image) {
  switch (image.format()) {
    case ImageFormat::Jpeg:
      return assemble_app11(scan_jpeg_segments(image));
    case ImageFormat::Png: {
      std::optional<JumbfCarrier> carrier;
      for (auto& chunk : scan_png_chunks(image)) {
        if (chunk.type_code != png::kProvenanceChunk) continue;
        if (carrier) throw MalformedContainer("more than one caBX chunk");
        if (chunk.payload.size() > kMaxJumbfSize) throw MalformedContainer("caBX payload exceeds 64 MiB");
        carrier = JumbfCarrier{std::move(chunk.payload), {chunk.total_range}};
      }
      return carrier;
    }
    case ImageFormat::Unknown:
      break;
  }
  return std::nullopt;
}

std::optional<JumbfCarrier> salvage_jumbf(ByteView data) {
  const std::size_t size = data.size();
  std::vector<Segment> candidates;
  for (std::size_t i = 0; i + 4 + kApp11PrefixSize + kBoxHeaderSize <= size; ++i) {
    if (data[i] != 0xFF || data[i + 1] != jpeg::kApp11) continue;
    const std::size_t declared = read_be16(data.data() + i + 2);
    if (declared < 2 + kApp11PrefixSize + kBoxHeaderSize || declared > size - i - 2) continue;
    Segment s;
    s.marker = jpeg::kApp11;
    s.file_offset = i;
    s.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(i + 4),
                     data.begin() + static_cast<std::ptrdiff_t>(i + 2 + declared));
    s.total_range = {i, 2 + declared};
    if (!is_jumbf_app11(s)) continue;
    candidates.push_back(std::move(s));
    i += 1 + declared;
  }
  try {
    if (auto carrier = assemble_app11(candidates)) return carrier;
  } catch (const MalformedContainer&) {
  }
  for (std::size_t p = 4; p + 8 <= size; ++p) {
    if (std::memcmp(data.data() + p, png::kProvenanceChunk, 4) != 0) continue;
    const std::uint64_t length = read_be32(data.data() + p - 4);
    if (length > kMaxJumbfSize || p + 8 + length > size) continue;
    JumbfCarrier carrier;
    carrier.jumbf.assign(data.begin() + static_cast<std::ptrdiff_t>(p + 4),
                         data.begin() + static_cast<std::ptrdiff_t>(p + 4 + length));
    carrier.covered_ranges.push_back({p - 4, 12 + length});
    return carrier;
  }
  return std::nullopt;
}

Bytes write_jpeg(const std::vector<SegmentSpec>& segments, ByteView tail) {
  Bytes out = {0xFF, jpeg::kSoi};
  for (const auto& s : segments) {
    if (s.payload.size() > jpeg::kMaxSegmentPayload) throw std::invalid_argument("segment payload too large");
    out.push_back(0xFF);
    out.push_back(s.marker);
    append_be16(out, static_cast<std::uint16_t>(s.payload.size() + 2));
    out.insert(out.end(), s.payload.begin(), s.payload.end());
  }
  if (tail.empty()) {
    out.push_back(0xFF);
    out.push_back(jpeg::kEoi);
  } else {
    out.insert(out.end(), tail.begin(), tail.end());
  }
  return out;
}

Bytes write_png(const std::vector<ChunkSpec>& chunks) {
  Bytes out(png::kSignature.begin(), png::kSignature.end());
  for (const auto& c : chunks) {
    if (c.type_code.size() != 4) throw std::invalid_argument("chunk type must have four characters");
    if (c.payload.size() > 0x7FFFFFFFu) throw std::invalid_argument("chunk payload too large");
    append_be32(out, static_cast<std::uint32_t>(c.payload.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), c.type_code.begin(), c.type_code.end());
    out.insert(out.end(), c.payload.begin(), c.payload.end());
    append_be32(out, png::crc32(ByteView{out}.subspan(type_at)));
  }
  return out;
}

std::vector<Bytes> split_jumbf_into_app11(ByteView jumbf, std::uint16_t instance, std::size_t max_payload) {
  if (jumbf.size() < kBoxHeaderSize) throw std::invalid_argument("JUMBF shorter than a box header");
  if (max_payload > jpeg::kMaxSegmentPayload || max_payload <= kApp11PrefixSize + kBoxHeaderSize) {
    throw std::invalid_argument("unusable APP11 payload size");
  }
  std::vector<Bytes> out;
  std::size_t pos = 0;
  std::uint32_t seq = 1;
  while (pos < jumbf.size()) {
    Bytes p = {'J', 'P'};
    append_be16(p, instance);
    append_be32(p, seq);
    if (seq > 1) p.insert(p.end(), jumbf.begin(), jumbf.begin() + kBoxHeaderSize);
    const std::size_t n = std::min(max_payload - p.size(), jumbf.size() - pos);
    p.insert(p.end(), jumbf.begin() + static_cast<std::ptrdiff_t>(pos),
             jumbf.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    ++seq;
    out.push_back(std::move(p));
  }
  return out;
}

Bytes strip_provenance(const ImageBytes& image) {
  std::vector<ByteRange> drop;
  if (image.format() == ImageFormat::Jpeg) {
    for (const auto& s : scan_jpeg_segments(image)) {
      if (is_jumbf_app11(s)) drop.push_back(s.total_range);
    }
  } else if (image.format() == ImageFormat::Png) {
    for (const auto& c : scan_png_chunks(image)) {
      if (c.type_code == png::kProvenanceChunk) drop.push_back(c.total_range);
    }
  }
  auto data = image.bytes();
  Bytes out;
  out.reserve(data.size());
  std::uint64_t pos = 0;
  for (const auto& r : drop) {
    out.insert(out.end(), data.begin() + static_cast<std::ptrdiff_t>(pos),
               data.begin() + static_cast<std::ptrdiff_t>(r.offset));
    pos = r.end();
  }
  out.insert(out.end(), data.begin() + static_cast<std::ptrdiff_t>(pos), data.end());
  return out;
}

}  // namespace originlens
