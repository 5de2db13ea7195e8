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
#ifndef SEPQ_FEATURE_STORE_H_
#define SEPQ_FEATURE_STORE_H_

// Reader/writer for `.fmap` tensor containers.
//
// Layout:
//   bytes [0, 6)      magic "FMAP\0\1"
//   bytes [6, 14)     manifest length L, uint64 little-endian
//   bytes [14, 14+L)  manifest, UTF-8 JSON:
//                       {"format_version": 1,
//                        "entries": [{"name", "shape", "byte_offset",
//                                     "byte_length"}, ...],
//                        "metadata": {...}}
//   bytes [14+L, end) blob region; each entry's float32 little-endian
//                     row-major payload sits at byte_offset relative to
//                     the start of the blob region.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sepq/tensor.h"

namespace sepq {

using Metadata = nlohmann::ordered_json;

inline constexpr std::array<char, 6> kContainerMagic = {'F', 'M', 'A', 'P',
                                                        '\0', '\1'};
inline constexpr int kContainerFormatVersion = 1;
// Magic plus the manifest length field.
inline constexpr std::size_t kContainerHeaderSize = 14;

struct ManifestEntry {
  std::string name;
  Shape shape;
  std::uint64_t byte_offset = 0;
  std::uint64_t byte_length = 0;
};

struct Manifest {
  int format_version = kContainerFormatVersion;
  std::vector<ManifestEntry> entries;
  Metadata metadata = Metadata::object();
  // Absolute file offset of the blob region (header + manifest).
  std::uint64_t blob_region_offset = 0;
};

struct Container {
  std::vector<Tensor> tensors;
  Metadata metadata = Metadata::object();

  const Tensor* Find(std::string_view name) const;
  // Throws FormatError naming the missing tensor.
  const Tensor& Get(std::string_view name) const;
};

// Serializes to an in-memory byte string. Throws FormatError on duplicate
// tensor names.
std::string EncodeContainer(std::span<const Tensor> tensors,
                            const Metadata& metadata);
// `source` is only used in error messages.
Container DecodeContainer(std::string_view bytes,
                          std::string_view source = "<memory>");
Manifest DecodeManifest(std::string_view bytes,
                        std::string_view source = "<memory>");

void WriteContainer(std::span<const Tensor> tensors, const Metadata& metadata,
                    const std::filesystem::path& path);
Container ReadContainer(const std::filesystem::path& path);
Manifest ReadManifest(const std::filesystem::path& path);

// Whole-file helpers shared with the report writers. Throw IoError.
std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace sepq

#endif  // SEPQ_FEATURE_STORE_H_
