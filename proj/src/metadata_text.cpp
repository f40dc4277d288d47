// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <cstring>

#include "metadata_internal.hpp"
#include "originlens/errors.hpp"
#include "originlens/metadata.hpp"

namespace originlens {

namespace detail {

bool is_valid_utf8(std::string_view s) { return sanitize_utf8(s) == s; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | cp >> 6);
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | cp >> 12);
    out += static_cast<char>(0x80 | (cp >> 6 & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | cp >> 18);
    out += static_cast<char>(0x80 | (cp >> 12 & 0x3F));
    out += static_cast<char>(0x80 | (cp >> 6 & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string binary_value(ByteView raw) { return to_hex(raw) + " (binary)"; }

std::string text_or_binary(std::string_view s) {
  for (unsigned char c : s) {
    if ((c < 0x20 && c != '\t' && c != '\n' && c != '\r') || c == 0x7F) return binary_value(as_bytes(s));
  }
  if (!is_valid_utf8(s)) return binary_value(as_bytes(s));
  return std::string(s);
}

std::string inflate_zlib(ByteView compressed, std::size_t limit) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw MalformedMetadata("zlib init failed");
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  std::string out;
  char buf[16384];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw MalformedMetadata("corrupt deflate stream");
    }
    out.append(buf, sizeof buf - zs.avail_out);
    if (out.size() > limit) {
      inflateEnd(&zs);
      throw MalformedMetadata("decompressed text exceeds limit");
    }
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw MalformedMetadata("truncated deflate stream");
    }
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace detail

namespace {

constexpr std::size_t kMaxInflatedText = 8u * 1024u * 1024u;

// --- IPTC ------------------------------------------------------------------

const char* iptc_name(std::uint8_t record, std::uint8_t dataset) {
  if (record != 2) return nullptr;
  switch (dataset) {
    case 120: return "Caption/Abstract";
    case 110: return "Credit";
    case 115: return "Source";
    default: return nullptr;
  }
}

std::string iptc_text(std::string_view raw) {
  std::string_view s = raw.substr(0, raw.find('\0'));
  // IIM text without a declared character set is usually Latin-1.
  return detail::is_valid_utf8(s) ? std::string(s) : latin1_to_utf8(s);
}

void parse_iim(ByteView iim, MetadataRecordSet& out) {
  std::size_t pos = 0;
  while (pos < iim.size()) {
    if (iim[pos] != 0x1C) break;  // trailing padding
    if (iim.size() - pos < 5) throw MalformedMetadata("IPTC dataset header truncated");
    const std::uint8_t record = iim[pos + 1];
    const std::uint8_t dataset = iim[pos + 2];
    std::uint64_t length = read_be16(iim.data() + pos + 3);
    pos += 5;
    if (length & 0x8000) {
      const std::size_t n = length & 0x7FFF;
      if (n == 0 || n > 8 || iim.size() - pos < n) throw MalformedMetadata("IPTC extended length truncated");
      length = 0;
      for (std::size_t i = 0; i < n; ++i) length = length << 8 | iim[pos + i];
      pos += n;
    }
    if (length > iim.size() - pos) throw MalformedMetadata("IPTC dataset overruns payload");
    if (const char* name = iptc_name(record, dataset)) {
      out.push_back({MetadataSource::Iptc, name, iptc_text(to_string(iim.subspan(pos, length)))});
    }
    pos += length;
  }
}

// --- PNG text ----------------------------------------------------------------

std::pair<std::string_view, std::string_view> split_keyword(const Bytes& payload, const std::string& type) {
  std::string_view s(reinterpret_cast<const char*>(payload.data()), payload.size());
  const auto nul = s.find('\0');
  if (nul == std::string_view::npos || nul == 0 || nul > 79) {
    throw MalformedMetadata(type + " chunk has no valid keyword");
  }
  return {s.substr(0, nul), s.substr(nul + 1)};
}

}  // namespace

const char* to_string(MetadataSource source) {
  switch (source) {
    case MetadataSource::Exif: return "exif";
    case MetadataSource::Iptc: return "iptc";
    case MetadataSource::PngText: return "png_text";
  }
  return "unknown";
}

MetadataRecordSet parse_iptc(ByteView app13_payload) {
  static constexpr std::string_view kPhotoshop("Photoshop 3.0\0", 14);
  MetadataRecordSet out;
  if (app13_payload.size() < kPhotoshop.size() ||
      std::memcmp(app13_payload.data(), kPhotoshop.data(), kPhotoshop.size()) != 0) {
    return out;
  }
  std::size_t pos = kPhotoshop.size();
  const std::size_t end = app13_payload.size();
  while (pos < end) {
    if (end - pos < 4 || std::memcmp(app13_payload.data() + pos, "8BIM", 4) != 0) {
      // Some writers pad the segment; anything else is damage.
      bool padding = true;
      for (std::size_t i = pos; i < end; ++i) padding = padding && app13_payload[i] == 0;
      if (padding) break;
      throw MalformedMetadata("bad image resource block signature");
    }
    pos += 4;
    if (end - pos < 3) throw MalformedMetadata("image resource block truncated");
    const std::uint16_t id = read_be16(app13_payload.data() + pos);
    pos += 2;
    std::size_t name_len = app13_payload[pos];
    std::size_t name_field = 1 + name_len;
    if (name_field % 2) ++name_field;
    if (end - pos < name_field + 4) throw MalformedMetadata("image resource block truncated");
    pos += name_field;
    const std::uint32_t size = read_be32(app13_payload.data() + pos);
    pos += 4;
    if (size > end - pos) throw MalformedMetadata("image resource overruns payload");
    if (id == 0x0404) parse_iim(app13_payload.subspan(pos, size), out);
    pos += size;
    if (size % 2 && pos < end) ++pos;
  }
  return out;
}

MetadataRecordSet parse_png_text(const std::vector<Chunk>& chunks) {
  MetadataRecordSet out;
  for (const auto& chunk : chunks) {
    if (chunk.type_code == "tEXt") {
      auto [key, text] = split_keyword(chunk.payload, chunk.type_code);
      out.push_back({MetadataSource::PngText, latin1_to_utf8(key), latin1_to_utf8(text)});
    } else if (chunk.type_code == "zTXt") {
      auto [key, rest] = split_keyword(chunk.payload, chunk.type_code);
      if (rest.empty() || rest[0] != 0) throw MalformedMetadata("zTXt uses an unknown compression method");
      auto text = detail::inflate_zlib(as_bytes(rest.substr(1)), kMaxInflatedText);
      out.push_back({MetadataSource::PngText, latin1_to_utf8(key), latin1_to_utf8(text)});
    } else if (chunk.type_code == "iTXt") {
      auto [key, rest] = split_keyword(chunk.payload, chunk.type_code);
      if (rest.size() < 2) throw MalformedMetadata("iTXt header truncated");
      const bool compressed = rest[0] != 0;
      if (compressed && rest[1] != 0) throw MalformedMetadata("iTXt uses an unknown compression method");
      rest.remove_prefix(2);
      const auto lang_end = rest.find('\0');
      if (lang_end == std::string_view::npos) throw MalformedMetadata("iTXt language tag unterminated");
      rest.remove_prefix(lang_end + 1);
      const auto tkey_end = rest.find('\0');
      if (tkey_end == std::string_view::npos) throw MalformedMetadata("iTXt translated keyword unterminated");
      rest.remove_prefix(tkey_end + 1);
      std::string text = compressed ? detail::inflate_zlib(as_bytes(rest), kMaxInflatedText) : std::string(rest);
      out.push_back({MetadataSource::PngText, latin1_to_utf8(key), sanitize_utf8(text)});
    }
  }
  return out;
}

}  // namespace originlens
