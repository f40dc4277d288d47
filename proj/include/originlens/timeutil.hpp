// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace originlens {

using UtcTime = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fraction and a "Z" or
/// "+HH:MM" suffix. Fractions are truncated.
std::optional<UtcTime> parse_rfc3339(std::string_view text);

/// Accepts a bare "YYYY-MM-DD" date as well as full RFC 3339 timestamps.
std::optional<UtcTime> parse_date_or_timestamp(std::string_view text);

/// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(UtcTime t);

UtcTime utc_now();

}  // namespace originlens
