// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// JPEG and PNG container scanning. Only the marker/chunk structure is
// interpreted; pixel data is never decoded.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "originlens/bytes.hpp"

namespace originlens {

enum class ImageFormat { Jpeg, Png, Unknown };

const char* to_string(ImageFormat format);

/// Detects the container from its signature bytes. Never fails.
ImageFormat detect_format(ByteView bytes);

/// Immutable, cheaply copyable image buffer tagged with its detected format.
class ImageBytes {
 public:
  ImageBytes() : ImageBytes(Bytes{}) {}
  explicit ImageBytes(Bytes bytes);

  ByteView bytes() const { return {data_->data(), data_->size()}; }
  ImageFormat format() const { return format_; }
  std::size_t size() const { return data_->size(); }
  bool empty() const { return data_->empty(); }

 private:
  std::shared_ptr<const Bytes> data_;
  ImageFormat format_;
};

namespace jpeg {
inline constexpr std::uint8_t kSoi = 0xD8;
inline constexpr std::uint8_t kEoi = 0xD9;
inline constexpr std::uint8_t kSos = 0xDA;
inline constexpr std::uint8_t kApp0 = 0xE0;
inline constexpr std::uint8_t kApp1 = 0xE1;
inline constexpr std::uint8_t kApp11 = 0xEB;
inline constexpr std::uint8_t kApp13 = 0xED;
inline constexpr std::uint8_t kCom = 0xFE;
/// Largest payload a single segment can carry (length field is inclusive).
inline constexpr std::size_t kMaxSegmentPayload = 0xFFFF - 2;
}  // namespace jpeg

namespace png {
inline constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
/// Chunk type carrying the JUMBF provenance store.
inline constexpr char kProvenanceChunk[] = "caBX";
std::uint32_t crc32(ByteView type_and_payload);
}  // namespace png

/// An APPn or COM segment of a JPEG file.
struct Segment {
  std::uint8_t marker = 0;        // second marker byte, e.g. 0xEB for APP11
  std::uint64_t file_offset = 0;  // offset of the 0xFF byte
  Bytes payload;                  // excludes the two length bytes
  ByteRange total_range;          // marker through payload end
};

struct Chunk {
  std::string type_code;  // four characters
  Bytes payload;
  bool crc_valid = false;
  ByteRange total_range;  // length field through CRC
};

/// APPn and COM segments in file order, stopping at start-of-scan or EOI.
/// Throws MalformedContainer.
std::vector<Segment> scan_jpeg_segments(const ImageBytes& image);

/// All chunks through IEND. Throws MalformedContainer.
std::vector<Chunk> scan_png_chunks(const ImageBytes& image);

inline constexpr std::size_t kMaxJumbfSize = 64u * 1024u * 1024u;

struct JumbfCarrier {
  Bytes jumbf;
  std::vector<ByteRange> covered_ranges;  // sorted, disjoint
};

/// Reassembles the embedded JUMBF store (APP11 for JPEG, caBX for PNG).
/// Returns nullopt when no carrier is present. Throws MalformedContainer.
std::optional<JumbfCarrier> extract_jumbf(const ImageBytes& image);

/// Signature search for a carrier in a file whose container structure no
/// longer scans. Never throws; returns nullopt when nothing consistent is found.
std::optional<JumbfCarrier> salvage_jumbf(ByteView bytes);

// --- Writers (fixture and round-trip support) ---------------------------

struct SegmentSpec {
  std::uint8_t marker = 0;
  Bytes payload;
};

/// SOI, the given segments, then `tail` verbatim (e.g. tables, SOS, scan
/// data and EOI). An empty tail writes EOI. Throws std::invalid_argument on
/// oversized payloads.
Bytes write_jpeg(const std::vector<SegmentSpec>& segments, ByteView tail = {});

struct ChunkSpec {
  std::string type_code;
  Bytes payload;
};

/// Signature plus the chunks with freshly computed CRCs. IEND is not added.
Bytes write_png(const std::vector<ChunkSpec>& chunks);

/// Splits a JUMBF store into APP11 segment payloads (common identifier "JP",
/// instance number, 1-based sequence number, repeated box header on
/// continuation segments).
std::vector<Bytes> split_jumbf_into_app11(ByteView jumbf, std::uint16_t instance = 1,
                                          std::size_t max_payload = jpeg::kMaxSegmentPayload);

/// Copy of the image with every provenance carrier removed.
Bytes strip_provenance(const ImageBytes& image);

}  // namespace originlens
