/* Copyright 2026 The sepq Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "sepq/feature_store.h"

#include <unistd.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "sepq/errors.h"

namespace sepq {
namespace {

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("sepq_fs_" + std::to_string(::getpid()) + "_" + name);
}

Tensor RandomTensor(std::mt19937& rng, const std::string& name) {
  std::uniform_int_distribution<int> rank_dist(1, 4), dim_dist(1, 5);
  Shape shape(static_cast<std::size_t>(rank_dist(rng)));
  for (auto& d : shape) d = dim_dist(rng);
  std::vector<float> data(static_cast<std::size_t>(NumElements(shape)));
  std::uniform_int_distribution<std::uint32_t> bits;
  // Arbitrary bit patterns, NaNs and denormals included.
  for (auto& v : data) v = std::bit_cast<float>(bits(rng));
  return Tensor(name, shape, data);
}

TEST(TensorTest, RejectsBadShapes) {
  EXPECT_THROW(Tensor("t", {2, 3}, std::vector<float>(5)), ShapeError);
  EXPECT_THROW(Tensor("t", {}, {}), ShapeError);
  EXPECT_THROW(Tensor("t", {1, 1, 1, 1, 1}, {1.0f}), ShapeError);
  EXPECT_THROW(Tensor("t", {0}, {}), ShapeError);
  EXPECT_NO_THROW(Tensor("t", {2, 3}, std::vector<float>(6)));
}

TEST(FeatureStoreTest, RoundTripIsBitExact) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Tensor> tensors;
    const int count = trial % 5;
    for (int i = 0; i < count; ++i) tensors.push_back(RandomTensor(rng, "t" + std::to_string(i)));
    Metadata meta = {{"layers", {"a", "b"}}, {"n", trial}};
    const Container c = DecodeContainer(EncodeContainer(tensors, meta));
    ASSERT_EQ(c.tensors.size(), tensors.size());
    for (std::size_t i = 0; i < tensors.size(); ++i) EXPECT_EQ(c.tensors[i], tensors[i]);
    EXPECT_EQ(c.metadata, meta);
  }
}

TEST(FeatureStoreTest, FileRoundTrip) {
  const auto path = TempPath("roundtrip.fmap");
  std::vector<Tensor> tensors = {Tensor("w", {2, 2}, {1, -2, 3.5f, 0}),
                                 Tensor("b", {3}, {0.25f, 0.5f, 1e-30f})};
  WriteContainer(tensors, {{"k", "v"}}, path);
  const Container c = ReadContainer(path);
  EXPECT_EQ(c.tensors, tensors);
  EXPECT_EQ(c.metadata["k"], "v");
  EXPECT_EQ(c.Get("b").shape(), (Shape{3}));
  EXPECT_EQ(c.Find("missing"), nullptr);
  EXPECT_THROW(c.Get("missing"), FormatError);
  std::filesystem::remove(path);
}

TEST(FeatureStoreTest, EmptyContainer) {
  const std::string bytes = EncodeContainer({}, Metadata::object());
  const Manifest m = DecodeManifest(bytes);
  EXPECT_TRUE(m.entries.empty());
  EXPECT_EQ(m.blob_region_offset, bytes.size());
  EXPECT_TRUE(DecodeContainer(bytes).tensors.empty());
}

TEST(FeatureStoreTest, HeaderLayoutAndOffsets) {
  std::vector<float> data = {1, 2, 3, 4, 5, 6};
  const std::string bytes = EncodeContainer(std::vector<Tensor>{Tensor("x", {2, 3}, data)},
                                            Metadata::object());
  ASSERT_EQ(bytes.substr(0, 6), std::string("FMAP\0\1", 6));
  std::uint64_t manifest_length = 0;
  for (int i = 0; i < 8; ++i) {
    manifest_length |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[6 + i]))
                       << (8 * i);
  }
  const auto manifest = nlohmann::json::parse(bytes.substr(14, manifest_length));
  EXPECT_EQ(manifest["format_version"], 1);
  EXPECT_EQ(manifest["entries"][0]["byte_length"], 24);
  EXPECT_EQ(manifest["entries"][0]["byte_offset"], 0);
  // Blob region starts right after the manifest.
  const std::size_t blob = 14 + manifest_length;
  EXPECT_EQ(bytes.size(), blob + 24);
  float first = 0, last = 0;
  std::memcpy(&first, bytes.data() + blob, 4);
  std::memcpy(&last, bytes.data() + blob + 20, 4);
  EXPECT_EQ(first, 1.0f);
  EXPECT_EQ(last, 6.0f);
  EXPECT_EQ(DecodeManifest(bytes).blob_region_offset, blob);
}

TEST(FeatureStoreTest, DuplicateNamesRejected) {
  std::vector<Tensor> tensors = {Tensor("a", {1}, {1}), Tensor("a", {1}, {2})};
  EXPECT_THROW(EncodeContainer(tensors, Metadata::object()), FormatError);
}

std::string Corrupt(const std::string& bytes, const std::string& from, const std::string& to) {
  // Rewrites the manifest and its length prefix.
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) {
    len |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[6 + i])) << (8 * i);
  }
  std::string manifest = bytes.substr(14, len);
  const auto pos = manifest.find(from);
  EXPECT_NE(pos, std::string::npos);
  manifest.replace(pos, from.size(), to);
  std::string out = bytes.substr(0, 6);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((manifest.size() >> (8 * i)) & 0xff));
  return out + manifest + bytes.substr(14 + len);
}

void ExpectFormatError(const std::string& bytes, const std::string& needle) {
  try {
    DecodeContainer(bytes);
    FAIL() << "expected FormatError containing '" << needle << "'";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(FeatureStoreTest, RejectsCorruptFiles) {
  const std::vector<Tensor> tensors = {Tensor("first", {2}, {1, 2}),
                                       Tensor("second", {3}, {3, 4, 5})};
  const std::string good = EncodeContainer(tensors, Metadata::object());

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  ExpectFormatError(bad_magic, "bad magic");

  ExpectFormatError(good.substr(0, good.size() - 1), "second");
  ExpectFormatError(good.substr(0, 10), "truncated header");
  ExpectFormatError(Corrupt(good, "\"byte_length\":8", "\"byte_length\":12"), "first");
  ExpectFormatError(Corrupt(good, "\"byte_offset\":8", "\"byte_offset\":4"), "overlaps");
  ExpectFormatError(Corrupt(good, "\"name\":\"second\"", "\"name\":\"first\""), "duplicate");
  ExpectFormatError(Corrupt(good, "\"format_version\":1", "\"format_version\":9"), "format_version");
}

TEST(FeatureStoreTest, MissingFileIsIoError) {
  EXPECT_THROW(ReadContainer("/nonexistent/dir/file.fmap"), IoError);
}

TEST(FeatureStoreTest, FixtureDumpMatchesItsManifest) {
  const auto path = std::filesystem::path(SEPQ_FIXTURE_DIR) / "features.fmap";
  const Manifest manifest = ReadManifest(path);
  const Container dump = ReadContainer(path);
  ASSERT_EQ(manifest.entries.size(), dump.tensors.size());
  const auto n = manifest.metadata.at("n").get<std::int64_t>();
  for (std::size_t i = 0; i < dump.tensors.size(); ++i) {
    EXPECT_EQ(manifest.entries[i].name, dump.tensors[i].name());
    EXPECT_EQ(manifest.entries[i].shape, dump.tensors[i].shape());
    EXPECT_EQ(dump.tensors[i].rank(), 4u);
    EXPECT_EQ(dump.tensors[i].dim(0), n);
  }
  // Re-encoding reproduces identical payloads.
  EXPECT_EQ(DecodeContainer(EncodeContainer(dump.tensors, dump.metadata)).tensors, dump.tensors);
}

}  // namespace
}  // namespace sepq
