// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <system_error>

#include "originlens/errors.hpp"
#include "originlens/fixture_signer.hpp"

namespace originlens::fixture {

namespace {

// Flips one entropy-coded (JPEG) or IDAT (PNG) byte, away from any carrier.
Bytes tamper(const ImageBytes& image) {
  Bytes out(image.bytes().begin(), image.bytes().end());
  std::size_t at = 0;
  if (image.format() == ImageFormat::Jpeg) {
    at = out.size() - 3;
  } else {
    for (const auto& c : scan_png_chunks(image)) {
      if (c.type_code == "IDAT") {
        at = static_cast<std::size_t>(c.total_range.offset + 8 + c.payload.size() / 2);
        break;
      }
    }
  }
  std::uint8_t flipped = out[at] ^ 0x01;
  if (flipped == 0xFF) flipped = out[at] ^ 0x02;
  out[at] = flipped;
  return out;
}

PlainImageOptions plain_options(std::uint32_t width, std::uint32_t height, std::uint64_t seed) {
  PlainImageOptions o;
  o.width = width;
  o.height = height;
  o.seed = seed;
  return o;
}

void write_file(const std::filesystem::path& path, ByteView data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FixtureError("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!f) throw FixtureError("write failed for " + path.string());
}

}  // namespace

std::vector<CorpusEntry> write_corpus(const std::filesystem::path& dir, const CorpusOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw FixtureError("cannot create " + dir.string());

  const UtcTime now = options.now;
  const TestCa ca = TestCa::make(now, options.validity_days, options.seed);
  const SigningIdentity signer = ca.issue_leaf();

  LeafOptions expired_leaf;
  expired_leaf.key_label = "expired";
  expired_leaf.common_name = "Origin Lens Expired Signer";
  expired_leaf.not_before = now - std::chrono::days(400);
  expired_leaf.not_after = now - std::chrono::days(1);
  const SigningIdentity expired = ca.issue_leaf(expired_leaf);

  const TestCa rogue_ca = TestCa::make(now, options.validity_days, options.seed + "/rogue");
  const SigningIdentity rogue = rogue_ca.issue_leaf();

  const ImageBytes plain_jpeg(make_plain_jpeg(plain_options(64, 48, 1)));
  const ImageBytes plain_png(make_plain_png(plain_options(32, 24, 2)));

  std::vector<CorpusEntry> entries;
  auto emit = [&](const std::string& name, ByteView data, const std::string& status) {
    write_file(dir / name, data);
    entries.push_back({name, status});
  };

  const std::string camera = "Origin Lens Camera 1.0";
  for (const auto& [plain, ext] : {std::pair{plain_jpeg, std::string("jpg")}, std::pair{plain_png, std::string("png")}}) {
    const ImageBytes clean = sign_and_embed(plain, signer, {capture_actions(camera)}, camera, now);
    emit("clean." + ext, clean.bytes(), "verified");
    const ImageBytes ai = sign_and_embed(plain, signer, {generative_actions("Adobe Firefly 2.0")},
                                         "Adobe Firefly 2.0", now);
    emit("ai_claim." + ext, ai.bytes(), "ai_generated");
    emit("tampered." + ext, tamper(clean), "invalid");
    emit("stripped." + ext, strip_provenance(clean), "no_data");
    const ImageBytes old = sign_and_embed(plain, expired, {capture_actions(camera)}, camera, now);
    emit("expired." + ext, old.bytes(), "warning");
    const ImageBytes spoofed = sign_and_embed(plain, rogue, {capture_actions(camera)}, camera, now);
    emit("untrusted." + ext, spoofed.bytes(), "invalid");
  }

  PlainImageOptions sd_png = plain_options(32, 24, 3);
  sd_png.png_text = {{"parameters",
                      "a lighthouse at dusk, oil painting\nSteps: 20, Sampler: Euler a, CFG scale: 7, Seed: 1234, "
                      "Size: 512x512, Model: v1-5-pruned-emaonly"}};
  emit("ai_metadata.png", make_plain_png(sd_png), "ai_generated");

  PlainImageOptions sd_jpeg = plain_options(64, 48, 4);
  sd_jpeg.exif_software = "Stable Diffusion v1.5";
  emit("ai_exif.jpg", make_plain_jpeg(sd_jpeg), "ai_generated");

  const ImageBytes history = make_ingredient_chain(plain_jpeg, 3, signer, now);
  emit("history3.jpg", history.bytes(), "verified");

  const std::string pem = ca.root_pem();
  write_file(dir / "roots.pem", as_bytes(pem));

  std::string manifest;
  for (const auto& e : entries) manifest += e.file_name + "\t" + e.expected_status + "\n";
  write_file(dir / "expected.tsv", as_bytes(manifest));
  return entries;
}

}  // namespace originlens::fixture
