// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace originlens {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ORIGINLENS_DEFINE_ERROR(Name)   \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

ORIGINLENS_DEFINE_ERROR(MalformedContainer);
ORIGINLENS_DEFINE_ERROR(MalformedBox);
ORIGINLENS_DEFINE_ERROR(InvalidTree);
ORIGINLENS_DEFINE_ERROR(CborError);
ORIGINLENS_DEFINE_ERROR(ManifestParseError);
ORIGINLENS_DEFINE_ERROR(RangeOutOfBounds);
ORIGINLENS_DEFINE_ERROR(UnsupportedAlgorithm);
ORIGINLENS_DEFINE_ERROR(TrustMaterialError);
ORIGINLENS_DEFINE_ERROR(MalformedMetadata);
ORIGINLENS_DEFINE_ERROR(RuleTableError);
ORIGINLENS_DEFINE_ERROR(TransportError);
ORIGINLENS_DEFINE_ERROR(UnreadableInput);
ORIGINLENS_DEFINE_ERROR(UnsupportedFormat);
ORIGINLENS_DEFINE_ERROR(FixtureError);

#undef ORIGINLENS_DEFINE_ERROR

}  // namespace originlens
