// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// Text helpers shared by the metadata parsers.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "originlens/bytes.hpp"

namespace originlens::detail {

bool is_valid_utf8(std::string_view s);

void append_utf8(std::string& out, std::uint32_t cp);

/// Hex with a " (binary)" suffix.
std::string binary_value(ByteView raw);

/// The text itself when it is valid UTF-8 without control characters other
/// than tab and newline; otherwise binary_value.
std::string text_or_binary(std::string_view s);

/// Inflates a zlib stream. Throws MalformedMetadata on a corrupt stream or
/// output above `limit` bytes.
std::string inflate_zlib(ByteView compressed, std::size_t limit);

}  // namespace originlens::detail
