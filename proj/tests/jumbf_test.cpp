// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "originlens/errors.hpp"
#include "originlens/jumbf.hpp"
#include "originlens/manifest.hpp"
#include "support.hpp"

namespace originlens::jumbf {
namespace {

Bytes raw_box(std::uint32_t lbox, const char* type, const Bytes& content) {
  Bytes b;
  append_be32(b, lbox);
  b.insert(b.end(), type, type + 4);
  b.insert(b.end(), content.begin(), content.end());
  return b;
}

TEST(ParseBoxTree, EmptyFreeLeaf) {
  const Box b = parse_box_tree(raw_box(8, "free", {}));
  EXPECT_EQ(b.type, "free");
  EXPECT_FALSE(b.is_superbox());
  EXPECT_TRUE(b.payload.empty());
  EXPECT_EQ(b.source, (ByteRange{0, 8}));
}

TEST(ParseBoxTree, GoldenEmptyStore) {
  const Bytes golden = testing::read_fixture("jumbf_empty_store.bin");
  const Box root = parse_box_tree(golden);
  EXPECT_TRUE(root.is_superbox());
  EXPECT_EQ(root.label, "c2pa");
  EXPECT_EQ(root.uuid, c2pa::kStoreUuid);
  EXPECT_TRUE(root.children.empty());
  EXPECT_EQ(serialize_box_tree(make_superbox(c2pa::kStoreUuid, "c2pa")), golden);
}

TEST(ParseBoxTree, GoldenNestedTree) {
  const Bytes golden = testing::read_fixture("jumbf_nested.bin");
  const Box expected = make_superbox(
      c2pa::kStoreUuid, "c2pa",
      {make_superbox(c2pa::kManifestUuid, "urn:uuid:golden",
                     {make_superbox(c2pa::kAssertionStoreUuid, "c2pa.assertions",
                                    {make_superbox(c2pa::kCborUuid, "c2pa.actions", {make_leaf("cbor", {0xA0})})}),
                      make_leaf("free", {})})});
  EXPECT_EQ(parse_box_tree(golden), expected);
  EXPECT_EQ(serialize_box_tree(expected), golden);
  EXPECT_EQ(encoded_size(expected), golden.size());
}

TEST(ParseBoxTree, LengthBelowHeaderIsMalformed) {
  EXPECT_THROW(parse_box_tree(raw_box(4, "free", {})), MalformedBox);
  EXPECT_THROW(parse_box_tree(raw_box(0, "free", {})), MalformedBox);
}

TEST(ParseBoxTree, OverrunAndTrailingBytesAreMalformed) {
  EXPECT_THROW(parse_box_tree(raw_box(16, "free", {1, 2})), MalformedBox);
  Bytes trailing = raw_box(8, "free", {});
  trailing.push_back(0);
  EXPECT_THROW(parse_box_tree(trailing), MalformedBox);
  EXPECT_THROW(parse_box_tree(Bytes{}), MalformedBox);
}

TEST(ParseBoxTree, SuperboxWithoutDescriptionIsMalformed) {
  EXPECT_THROW(parse_box_tree(raw_box(16, "jumb", raw_box(8, "free", {}))), MalformedBox);
  EXPECT_THROW(parse_box_tree(raw_box(8, "jumb", {})), MalformedBox);
}

TEST(ParseBoxTree, ExtendedLengthForm) {
  Bytes b;
  append_be32(b, 1);
  b.insert(b.end(), {'f', 'r', 'e', 'e'});
  append_be64(b, 19);
  b.insert(b.end(), {'x', 'y', 'z'});
  const Box leaf = parse_box_tree(b);
  EXPECT_EQ(leaf.payload, (Bytes{'x', 'y', 'z'}));
  // Re-serialization uses the compact header.
  EXPECT_EQ(serialize_box_tree(leaf).size(), 11u);
}

TEST(ParseBoxTree, UnknownTypesKeptOpaque) {
  const Box root = make_superbox(c2pa::kStoreUuid, "c2pa", {make_leaf("vndr", {9, 8, 7})});
  const Box back = parse_box_tree(serialize_box_tree(root));
  ASSERT_EQ(back.children.size(), 1u);
  EXPECT_EQ(back.children[0].type, "vndr");
  EXPECT_EQ(back.children[0].payload, (Bytes{9, 8, 7}));
}

TEST(ParseBoxTree, DepthIsBounded) {
  Box b = make_leaf("free", {});
  for (int i = 0; i < 100; ++i) b = make_superbox(c2pa::kCborUuid, std::nullopt, {b});
  EXPECT_THROW(serialize_box_tree(b), InvalidTree);
}

TEST(SerializeBoxTree, EmptyLeafIsEightBytes) {
  EXPECT_EQ(serialize_box_tree(make_leaf("free", {})), (Bytes{0, 0, 0, 8, 'f', 'r', 'e', 'e'}));
}

TEST(SerializeBoxTree, InvariantViolations) {
  Box no_description;
  no_description.type = "jumb";
  EXPECT_THROW(serialize_box_tree(no_description), InvalidTree);
  Box leaf_with_children = make_leaf("free", {});
  leaf_with_children.children.push_back(make_leaf("free", {}));
  EXPECT_THROW(serialize_box_tree(leaf_with_children), InvalidTree);
  EXPECT_THROW(serialize_box_tree(make_leaf("toolong", {})), InvalidTree);
  EXPECT_THROW(serialize_box_tree(make_superbox(c2pa::kStoreUuid, std::string("a\0b", 3))), InvalidTree);
}

TEST(FindBox, PathResolution) {
  const Box root = parse_box_tree(testing::read_fixture("jumbf_nested.bin"));
  const std::vector<std::string> empty;
  EXPECT_EQ(find_box(root, empty), &root);
  const std::vector<std::string> path = {"urn:uuid:golden", "c2pa.assertions", "c2pa.actions"};
  const Box* actions = find_box(root, path);
  ASSERT_NE(actions, nullptr);
  EXPECT_EQ(actions->label, "c2pa.actions");
  const std::vector<std::string> missing = {"urn:uuid:golden", "nope"};
  EXPECT_EQ(find_box(root, missing), nullptr);
}

TEST(FindBox, HardBindingInSignedFixture) {
  const ImageBytes signed_image = testing::signed_capture(testing::plain_jpeg());
  const Box root = parse_box_tree(extract_jumbf(signed_image)->jumbf);
  ASSERT_EQ(root.children.size(), 1u);
  const std::vector<std::string> path = {*root.children[0].label, "c2pa.assertions", "c2pa.hash.data"};
  const Box* binding = find_box(root, path);
  ASSERT_NE(binding, nullptr);
  ASSERT_EQ(binding->children.size(), 1u);
  EXPECT_EQ(binding->children[0].type, "cbor");
}

Box random_tree(std::mt19937& rng, int depth) {
  if (depth >= 4 || rng() % 3 == 0) {
    Bytes payload(rng() % 40);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    static const char* kTypes[] = {"cbor", "json", "free", "uuid", "bidb"};
    return make_leaf(kTypes[rng() % 5], std::move(payload));
  }
  BoxUuid uuid{};
  for (auto& b : uuid) b = static_cast<std::uint8_t>(rng());
  std::optional<std::string> label;
  if (rng() % 4 != 0) label = "label-" + std::to_string(rng() % 1000);
  std::vector<Box> children;
  const int n = static_cast<int>(rng() % 9);
  for (int i = 0; i < n; ++i) children.push_back(random_tree(rng, depth + 1));
  return make_superbox(uuid, std::move(label), std::move(children));
}

void check_sources(const Box& b, const Bytes& whole) {
  ASSERT_TRUE(b.source.has_value());
  const Bytes slice(whole.begin() + static_cast<std::ptrdiff_t>(b.source->offset),
                    whole.begin() + static_cast<std::ptrdiff_t>(b.source->end()));
  EXPECT_EQ(slice.size(), encoded_size(b));
  EXPECT_EQ(read_be32(slice.data()), slice.size());
  for (const auto& c : b.children) check_sources(c, whole);
}

// Property: structural round trip, and lengths written equal lengths re-read.
TEST(JumbfProperty, RandomTreesRoundTrip) {
  std::mt19937 rng(21);
  for (int i = 0; i < 500; ++i) {
    const Box tree = random_tree(rng, 0);
    const Bytes bytes = serialize_box_tree(tree);
    ASSERT_EQ(bytes.size(), encoded_size(tree));
    const Box back = parse_box_tree(bytes);
    ASSERT_EQ(back, tree);
    check_sources(back, bytes);
  }
}

TEST(JumbfProperty, ParseIsTotal) {
  std::mt19937 rng(22);
  const Bytes seed_bytes = serialize_box_tree(random_tree(rng, 0));
  for (int i = 0; i < 20000; ++i) {
    Bytes b = seed_bytes;
    if (b.empty()) continue;
    const int flips = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < flips; ++k) b[rng() % b.size()] = static_cast<std::uint8_t>(rng());
    if (rng() % 2) b.resize(rng() % (b.size() + 1));
    try {
      parse_box_tree(b);
    } catch (const MalformedBox&) {
    }
  }
}

}  // namespace
}  // namespace originlens::jumbf
