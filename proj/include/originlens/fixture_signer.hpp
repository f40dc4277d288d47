// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// Test-only signing: deterministic CA hierarchy, manifest builder and carrier
// embedding. Never linked into the verification paths.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "originlens/cbor.hpp"
#include "originlens/container.hpp"
#include "originlens/manifest.hpp"
#include "originlens/timeutil.hpp"

namespace originlens::fixture {

/// 2025-06-01T00:00:00Z, the default corpus clock.
UtcTime default_fixture_clock();

inline constexpr char kDefaultSeed[] = "origin-lens-fixture";

class SigningIdentity {
 public:
  SignatureAlgorithm algorithm() const { return algorithm_; }
  /// Leaf first, then the issuing intermediate. The root is not included.
  const std::vector<Bytes>& cert_chain() const { return chain_; }

  /// ES256: raw r||s (64 bytes), deterministic per key and message.
  /// RS256: PKCS#1 v1.5.
  Bytes sign(ByteView message) const;

  struct Key;

 private:
  friend class TestCa;
  SignatureAlgorithm algorithm_ = SignatureAlgorithm::ES256;
  std::vector<Bytes> chain_;
  std::shared_ptr<const Key> key_;
};

struct LeafOptions {
  std::string common_name = "Origin Lens Test Signer";
  SignatureAlgorithm algorithm = SignatureAlgorithm::ES256;  // RS256 keys are random
  std::optional<UtcTime> not_before;                         // default: CA clock
  std::optional<UtcTime> not_after;                          // default: CA clock + validity
  bool document_signing_usage = true;
  std::string key_label = "leaf";  // varies the derived leaf key
};

/// Ed25519 root and intermediate derived from a seed. Leaves are issued by
/// the intermediate.
class TestCa {
 public:
  /// Throws std::invalid_argument when validity_days < 1.
  static TestCa make(UtcTime now, int validity_days, std::string_view seed = kDefaultSeed);

  const Bytes& root_der() const { return root_der_; }
  const Bytes& intermediate_der() const { return intermediate_der_; }
  std::string root_pem() const;

  SigningIdentity issue_leaf(const LeafOptions& options = {}) const;

  struct Keys;

 private:
  UtcTime now_{};
  int validity_days_ = 0;
  std::string seed_;
  Bytes root_der_;
  Bytes intermediate_der_;
  std::shared_ptr<const Keys> keys_;
};

inline TestCa make_test_ca(UtcTime now, int validity_days, std::string_view seed = kDefaultSeed) {
  return TestCa::make(now, validity_days, seed);
}

struct AssertionSpec {
  std::string label;
  cbor::Value content;
};

/// c2pa.actions for a camera capture.
AssertionSpec capture_actions(const std::string& software_agent);
/// c2pa.actions declaring trained-algorithmic-media origin.
AssertionSpec generative_actions(const std::string& software_agent);
/// c2pa.actions with a single edit step.
AssertionSpec edit_actions(const std::string& action, const std::string& software_agent);

struct EmbedOptions {
  /// Keep manifests already in the image and cite the active one as an
  /// ingredient of the new manifest.
  bool chain_existing = false;
  std::optional<std::string> manifest_label;  // default: derived urn:uuid
};

/// Builds and embeds a manifest whose hard binding covers the output file
/// with the carrier excluded. Deterministic for fixed inputs and ES256.
/// Throws UnsupportedFormat for inputs other than JPEG and PNG.
ImageBytes sign_and_embed(const ImageBytes& image, const SigningIdentity& identity,
                          const std::vector<AssertionSpec>& assertions, const std::string& claim_generator,
                          UtcTime now, const EmbedOptions& options = {});

/// `steps` chained signings; step i cites step i-1 as its ingredient.
/// Throws std::invalid_argument when steps < 1.
ImageBytes make_ingredient_chain(const ImageBytes& base, int steps, const SigningIdentity& identity,
                                 UtcTime now);

// --- Plain carriers ---------------------------------------------------------

struct PlainImageOptions {
  std::uint32_t width = 64;
  std::uint32_t height = 48;
  std::uint64_t seed = 1;
  /// Extra EXIF Software / ImageDescription values in an APP1 (JPEG) or
  /// eXIf (PNG) block.
  std::optional<std::string> exif_software;
  std::optional<std::string> exif_description;
  /// PNG only: tEXt chunks written before IDAT.
  std::vector<std::pair<std::string, std::string>> png_text;
  /// JPEG only: approximate size of the entropy-coded segment; 0 picks a
  /// size proportional to the pixel count.
  std::size_t jpeg_scan_bytes = 0;
};

/// A structurally valid baseline JPEG (SOF0 with the requested dimensions
/// and pseudo-random entropy-coded data). Not decodable to meaningful pixels.
Bytes make_plain_jpeg(const PlainImageOptions& options = {});

/// A decodable 8-bit RGB PNG with pseudo-random pixels.
Bytes make_plain_png(const PlainImageOptions& options = {});

/// TIFF stream (little endian) with the given IFD0 ASCII entries.
Bytes make_tiff(const std::vector<std::pair<std::uint16_t, std::string>>& ascii_tags);

/// 4000x3000 signed JPEG with EXIF, about 4 MB.
ImageBytes make_bench_image(const SigningIdentity& identity, UtcTime now);

// --- Corpus -----------------------------------------------------------------

struct CorpusEntry {
  std::string file_name;
  std::string expected_status;  // verdict status string
};

struct CorpusOptions {
  std::string seed = kDefaultSeed;
  UtcTime now = default_fixture_clock();
  int validity_days = 3650;
};

/// Writes the variant images, roots.pem and expected.tsv into `dir`
/// (created when missing). Throws FixtureError on IO failure.
std::vector<CorpusEntry> write_corpus(const std::filesystem::path& dir, const CorpusOptions& options = {});

}  // namespace originlens::fixture
