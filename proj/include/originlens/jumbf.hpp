// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "originlens/bytes.hpp"

namespace originlens::jumbf {

using BoxUuid = std::array<std::uint8_t, 16>;

inline constexpr char kSuperboxType[] = "jumb";
inline constexpr char kDescriptionType[] = "jumd";

/// A JUMBF box. A box of type "jumb" is a superbox: its description box is
/// folded into `uuid` and `label`, and `children` holds the remaining boxes.
/// Every other type is a leaf carrying `payload`.
struct Box {
  std::string type;  // four-character code
  std::optional<std::string> label;
  std::optional<BoxUuid> uuid;
  Bytes payload;
  std::vector<Box> children;

  /// Where the box was read from, relative to the parsed buffer. Not part of
  /// structural equality.
  std::optional<ByteRange> source;

  bool is_superbox() const { return type == kSuperboxType; }
  const Box* child(std::string_view child_label) const;

  friend bool operator==(const Box& a, const Box& b);
};

Box make_superbox(const BoxUuid& uuid, std::optional<std::string> label, std::vector<Box> children = {});
Box make_leaf(std::string type, Bytes payload);

/// Parses exactly one box spanning all of `bytes`. Unknown leaf types are kept
/// opaque. Throws MalformedBox.
Box parse_box_tree(ByteView bytes);

/// Throws InvalidTree when the tree breaks the box invariants.
Bytes serialize_box_tree(const Box& root);

/// Number of bytes serialize_box_tree emits for `box`.
std::uint64_t encoded_size(const Box& box);

/// Resolves superbox children by label, one path element per level.
/// An empty path returns `root`.
const Box* find_box(const Box& root, std::span<const std::string> label_path);

}  // namespace originlens::jumbf
