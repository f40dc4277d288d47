// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/jumbf.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "originlens/errors.hpp"

namespace originlens::jumbf {

namespace {

constexpr std::size_t kHeaderSize = 8;
constexpr std::size_t kExtendedHeaderSize = 16;
constexpr int kMaxDepth = 64;

constexpr std::uint8_t kToggleRequestable = 0x01;
constexpr std::uint8_t kToggleLabel = 0x02;
constexpr std::uint8_t kToggleId = 0x04;
constexpr std::uint8_t kToggleSignature = 0x08;

std::uint64_t header_size_for(std::uint64_t content) {
  return content + kHeaderSize > std::numeric_limits<std::uint32_t>::max() ? kExtendedHeaderSize : kHeaderSize;
}

std::uint64_t description_content_size(const Box& box) {
  return 16 + 1 + (box.label ? box.label->size() + 1 : 0);
}

std::uint64_t content_size(const Box& box) {
  if (!box.is_superbox()) return box.payload.size();
  std::uint64_t total = kHeaderSize + description_content_size(box);
  for (const auto& c : box.children) total += encoded_size(c);
  return total;
}

void validate(const Box& box, int depth) {
  if (box.type.size() != 4) throw InvalidTree("box type must be four characters");
  if (depth > kMaxDepth) throw InvalidTree("box tree nested too deeply");
  if (box.is_superbox()) {
    if (!box.uuid) throw InvalidTree("superbox without a description box");
    if (!box.payload.empty()) throw InvalidTree("superbox carrying a leaf payload");
    if (box.label && box.label->find('\0') != std::string::npos) {
      throw InvalidTree("description label contains NUL");
    }
    for (const auto& c : box.children) validate(c, depth + 1);
  } else {
    if (!box.children.empty()) throw InvalidTree("leaf box '" + box.type + "' has children");
    if (box.label || box.uuid) throw InvalidTree("leaf box '" + box.type + "' carries a description");
    if (box.type == kDescriptionType) throw InvalidTree("description box used as a leaf");
  }
}

void write_header(Bytes& out, const std::string& type, std::uint64_t content) {
  if (header_size_for(content) == kExtendedHeaderSize) {
    append_be32(out, 1);
    out.insert(out.end(), type.begin(), type.end());
    append_be64(out, content + kExtendedHeaderSize);
  } else {
    append_be32(out, static_cast<std::uint32_t>(content + kHeaderSize));
    out.insert(out.end(), type.begin(), type.end());
  }
}

void write_box(Bytes& out, const Box& box) {
  write_header(out, box.type, content_size(box));
  if (!box.is_superbox()) {
    out.insert(out.end(), box.payload.begin(), box.payload.end());
    return;
  }
  write_header(out, kDescriptionType, description_content_size(box));
  out.insert(out.end(), box.uuid->begin(), box.uuid->end());
  out.push_back(box.label ? static_cast<std::uint8_t>(kToggleRequestable | kToggleLabel) : std::uint8_t{0});
  if (box.label) {
    out.insert(out.end(), box.label->begin(), box.label->end());
    out.push_back(0);
  }
  for (const auto& c : box.children) write_box(out, c);
}

struct Parser {
  ByteView data;

  struct Header {
    std::string type;
    std::size_t content_begin;
    std::size_t end;
  };

  Header read_header(std::size_t pos, std::size_t limit) const {
    if (limit - pos < kHeaderSize) throw MalformedBox("truncated box header at offset " + std::to_string(pos));
    const std::uint32_t lbox = read_be32(data.data() + pos);
    std::string type(reinterpret_cast<const char*>(data.data() + pos + 4), 4);
    std::uint64_t size = lbox;
    std::size_t header = kHeaderSize;
    if (lbox == 1) {
      if (limit - pos < kExtendedHeaderSize) throw MalformedBox("truncated extended box header");
      size = read_be64(data.data() + pos + 8);
      header = kExtendedHeaderSize;
      if (size < kExtendedHeaderSize) throw MalformedBox("extended box length below 16");
    } else if (lbox < kHeaderSize) {
      throw MalformedBox("declared box length " + std::to_string(lbox) + " below the 8-byte minimum");
    }
    if (size > limit - pos) throw MalformedBox("box '" + type + "' overruns its container");
    return {std::move(type), pos + header, pos + static_cast<std::size_t>(size)};
  }

  Box parse(std::size_t pos, std::size_t limit, int depth, std::size_t* next) const {
    if (depth > kMaxDepth) throw MalformedBox("box tree nested too deeply");
    Header h = read_header(pos, limit);
    Box box;
    box.type = h.type;
    box.source = ByteRange{pos, h.end - pos};
    *next = h.end;
    if (!box.is_superbox()) {
      box.payload.assign(data.begin() + static_cast<std::ptrdiff_t>(h.content_begin),
                         data.begin() + static_cast<std::ptrdiff_t>(h.end));
      return box;
    }
    if (h.content_begin == h.end) throw MalformedBox("superbox lacks a description box");
    Header d = read_header(h.content_begin, h.end);
    if (d.type != kDescriptionType) throw MalformedBox("superbox's first child is not a description box");
    parse_description(d, box);
    std::size_t child_pos = d.end;
    while (child_pos < h.end) {
      std::size_t after = 0;
      box.children.push_back(parse(child_pos, h.end, depth + 1, &after));
      child_pos = after;
    }
    return box;
  }

  void parse_description(const Header& d, Box& box) const {
    std::size_t pos = d.content_begin;
    if (d.end - pos < 17) throw MalformedBox("description box shorter than 17 bytes");
    BoxUuid uuid{};
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(pos), 16, uuid.begin());
    box.uuid = uuid;
    const std::uint8_t toggles = data[pos + 16];
    pos += 17;
    if (toggles & kToggleLabel) {
      auto begin = data.begin() + static_cast<std::ptrdiff_t>(pos);
      auto end = data.begin() + static_cast<std::ptrdiff_t>(d.end);
      auto nul = std::find(begin, end, 0);
      if (nul == end) throw MalformedBox("description label is not NUL-terminated");
      box.label = std::string(begin, nul);
      pos = static_cast<std::size_t>(nul - data.begin()) + 1;
    }
    if (toggles & kToggleId) {
      if (d.end - pos < 4) throw MalformedBox("description box ID truncated");
      pos += 4;
    }
    if ((toggles & kToggleSignature) && d.end - pos < 32) {
      throw MalformedBox("description box signature truncated");
    }
    // Anything after is an optional private box; it is not interpreted.
  }
};

}  // namespace

const Box* Box::child(std::string_view child_label) const {
  for (const auto& c : children) {
    if (c.label && *c.label == child_label) return &c;
  }
  return nullptr;
}

bool operator==(const Box& a, const Box& b) {
  return a.type == b.type && a.label == b.label && a.uuid == b.uuid && a.payload == b.payload &&
         a.children == b.children;
}

Box make_superbox(const BoxUuid& uuid, std::optional<std::string> label, std::vector<Box> children) {
  Box b;
  b.type = kSuperboxType;
  b.uuid = uuid;
  b.label = std::move(label);
  b.children = std::move(children);
  return b;
}

Box make_leaf(std::string type, Bytes payload) {
  Box b;
  b.type = std::move(type);
  b.payload = std::move(payload);
  return b;
}

Box parse_box_tree(ByteView bytes) {
  if (bytes.empty()) throw MalformedBox("empty JUMBF buffer");
  Parser parser{bytes};
  std::size_t next = 0;
  Box root = parser.parse(0, bytes.size(), 0, &next);
  if (next != bytes.size()) throw MalformedBox("trailing bytes after the root box");
  return root;
}

std::uint64_t encoded_size(const Box& box) {
  std::uint64_t content = content_size(box);
  return content + header_size_for(content);
}

Bytes serialize_box_tree(const Box& root) {
  validate(root, 0);
  Bytes out;
  out.reserve(static_cast<std::size_t>(encoded_size(root)));
  write_box(out, root);
  return out;
}

const Box* find_box(const Box& root, std::span<const std::string> label_path) {
  const Box* current = &root;
  for (const auto& label : label_path) {
    current = current->child(label);
    if (!current) return nullptr;
  }
  return current;
}

}  // namespace originlens::jumbf
