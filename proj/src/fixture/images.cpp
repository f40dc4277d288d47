// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <algorithm>
#include <random>

#include "originlens/errors.hpp"
#include "originlens/fixture_signer.hpp"

namespace originlens::fixture {

namespace {

void append_le16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_le32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::vector<std::pair<std::uint16_t, std::string>> exif_tags(const PlainImageOptions& o) {
  std::vector<std::pair<std::uint16_t, std::string>> tags;
  if (o.exif_description) tags.emplace_back(0x010E, *o.exif_description);
  if (o.exif_software) tags.emplace_back(0x0131, *o.exif_software);
  return tags;
}

}  // namespace

Bytes make_tiff(const std::vector<std::pair<std::uint16_t, std::string>>& ascii_tags) {
  auto tags = ascii_tags;
  std::stable_sort(tags.begin(), tags.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Bytes out = {'I', 'I', 42, 0};
  append_le32(out, 8);
  const std::uint32_t ifd_size = 2 + 12 * static_cast<std::uint32_t>(tags.size()) + 4;
  std::uint32_t data_at = 8 + ifd_size;
  Bytes data;
  append_le16(out, static_cast<std::uint16_t>(tags.size()));
  for (const auto& [tag, value] : tags) {
    const auto count = static_cast<std::uint32_t>(value.size() + 1);
    append_le16(out, tag);
    append_le16(out, 2);  // ASCII
    append_le32(out, count);
    if (count <= 4) {
      Bytes inline_value(value.begin(), value.end());
      inline_value.resize(4, 0);
      out.insert(out.end(), inline_value.begin(), inline_value.end());
    } else {
      append_le32(out, data_at + static_cast<std::uint32_t>(data.size()));
      data.insert(data.end(), value.begin(), value.end());
      data.push_back(0);
      if (data.size() % 2) data.push_back(0);
    }
  }
  append_le32(out, 0);
  out.insert(out.end(), data.begin(), data.end());
  return out;
}

Bytes make_plain_jpeg(const PlainImageOptions& o) {
  if (o.width == 0 || o.height == 0 || o.width > 0xFFFF || o.height > 0xFFFF) {
    throw FixtureError("JPEG dimensions must be 1..65535");
  }
  std::vector<SegmentSpec> segments;
  segments.push_back({jpeg::kApp0, {'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0}});
  if (auto tags = exif_tags(o); !tags.empty()) {
    Bytes app1 = {'E', 'x', 'i', 'f', 0, 0};
    Bytes tiff = make_tiff(tags);
    app1.insert(app1.end(), tiff.begin(), tiff.end());
    segments.push_back({jpeg::kApp1, std::move(app1)});
  }
  Bytes dqt = {0x00};
  for (int i = 0; i < 64; ++i) dqt.push_back(static_cast<std::uint8_t>(1 + i / 4));
  segments.push_back({0xDB, std::move(dqt)});
  Bytes sof = {8};
  append_be16(sof, static_cast<std::uint16_t>(o.height));
  append_be16(sof, static_cast<std::uint16_t>(o.width));
  sof.insert(sof.end(), {3, 1, 0x22, 0, 2, 0x11, 0, 3, 0x11, 0});
  segments.push_back({0xC0, std::move(sof)});
  // Standard luminance DC table.
  segments.push_back({0xC4, {0x00, 0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}});
  segments.push_back({jpeg::kSos, {3, 1, 0x00, 2, 0x00, 3, 0x00, 0, 63, 0}});

  const std::size_t scan = o.jpeg_scan_bytes ? o.jpeg_scan_bytes
                                             : std::max<std::size_t>(64, std::size_t{o.width} * o.height / 8);
  Bytes tail;
  tail.reserve(scan + 2);
  std::mt19937_64 rng(o.seed);
  while (tail.size() < scan) {
    std::uint64_t word = rng();
    for (int i = 0; i < 8 && tail.size() < scan; ++i, word >>= 8) {
      const auto b = static_cast<std::uint8_t>(word);
      tail.push_back(b == 0xFF ? 0xFE : b);  // no markers inside entropy data
    }
  }
  tail.push_back(0xFF);
  tail.push_back(jpeg::kEoi);
  return write_jpeg(segments, tail);
}

Bytes make_plain_png(const PlainImageOptions& o) {
  if (o.width == 0 || o.height == 0 || o.width > 16384 || o.height > 16384) {
    throw FixtureError("PNG dimensions must be 1..16384");
  }
  std::vector<ChunkSpec> chunks;
  Bytes ihdr;
  append_be32(ihdr, o.width);
  append_be32(ihdr, o.height);
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
  chunks.push_back({"IHDR", std::move(ihdr)});
  if (auto tags = exif_tags(o); !tags.empty()) chunks.push_back({"eXIf", make_tiff(tags)});
  for (const auto& [key, text] : o.png_text) {
    Bytes payload(key.begin(), key.end());
    payload.push_back(0);
    payload.insert(payload.end(), text.begin(), text.end());
    chunks.push_back({"tEXt", std::move(payload)});
  }

  const std::size_t row = 1 + std::size_t{o.width} * 3;
  Bytes raw(row * o.height);
  std::mt19937_64 rng(o.seed);
  for (std::size_t y = 0; y < o.height; ++y) {
    raw[y * row] = 0;  // filter: none
    for (std::size_t x = 1; x < row; ++x) raw[y * row + x] = static_cast<std::uint8_t>(rng() >> 56);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  Bytes idat(len);
  if (compress2(idat.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw FixtureError("deflate failed");
  }
  idat.resize(len);
  chunks.push_back({"IDAT", std::move(idat)});
  chunks.push_back({"IEND", {}});
  return write_png(chunks);
}

ImageBytes make_bench_image(const SigningIdentity& identity, UtcTime now) {
  PlainImageOptions o;
  o.width = 4000;
  o.height = 3000;
  o.seed = 12;
  o.jpeg_scan_bytes = 4'000'000;
  o.exif_software = "Origin Lens Bench Camera 1.0";
  o.exif_description = "12 megapixel benchmark frame";
  return sign_and_embed(ImageBytes(make_plain_jpeg(o)), identity, {capture_actions("Origin Lens Bench Camera 1.0")},
                        "Origin Lens Bench Camera 1.0", now);
}

}  // namespace originlens::fixture
