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

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "sepq/errors.h"

namespace sepq {
namespace {

void AppendU64LE(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t ReadU64LE(std::string_view bytes, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i]))
         << (8 * i);
  }
  return v;
}

void AppendFloatsLE(std::string& out, std::span<const float> values) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * 4);
  if constexpr (std::endian::native == std::endian::little) {
    if (!values.empty()) std::memcpy(out.data() + start, values.data(), values.size() * 4);
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(values[i]);
      for (int b = 0; b < 4; ++b) {
        out[start + 4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
      }
    }
  }
}

std::vector<float> ReadFloatsLE(std::string_view bytes, std::size_t pos,
                                std::size_t count) {
  std::vector<float> values(count);
  if constexpr (std::endian::native == std::endian::little) {
    if (count) std::memcpy(values.data(), bytes.data() + pos, count * 4);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(
                    static_cast<unsigned char>(bytes[pos + 4 * i + b]))
                << (8 * b);
      }
      values[i] = std::bit_cast<float>(bits);
    }
  }
  return values;
}

[[noreturn]] void Fail(std::string_view source, const std::string& what) {
  throw FormatError(std::string(source) + ": " + what);
}

}  // namespace

const Tensor* Container::Find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name() == name) return &t;
  }
  return nullptr;
}

const Tensor& Container::Get(std::string_view name) const {
  if (const Tensor* t = Find(name)) return *t;
  throw FormatError("container has no tensor named '" + std::string(name) + "'");
}

std::string EncodeContainer(std::span<const Tensor> tensors,
                            const Metadata& metadata) {
  if (!metadata.is_object()) {
    throw InvalidArgument("container metadata must be a JSON object");
  }
  std::set<std::string_view> seen;
  Metadata entries = Metadata::array();
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    if (!seen.insert(t.name()).second) {
      throw FormatError("duplicate tensor name '" + t.name() + "'");
    }
    const std::uint64_t length = t.size() * 4;
    entries.push_back({{"name", t.name()},
                       {"shape", t.shape()},
                       {"byte_offset", offset},
                       {"byte_length", length}});
    offset += length;
  }
  Metadata manifest = {{"format_version", kContainerFormatVersion},
                       {"entries", std::move(entries)},
                       {"metadata", metadata}};
  const std::string text = manifest.dump();

  std::string out(kContainerMagic.begin(), kContainerMagic.end());
  AppendU64LE(out, text.size());
  out += text;
  out.reserve(out.size() + offset);
  for (const auto& t : tensors) AppendFloatsLE(out, t.data());
  return out;
}

Manifest DecodeManifest(std::string_view bytes, std::string_view source) {
  if (bytes.size() < kContainerMagic.size() ||
      !std::equal(kContainerMagic.begin(), kContainerMagic.end(), bytes.begin())) {
    Fail(source, "bad magic");
  }
  if (bytes.size() < kContainerHeaderSize) Fail(source, "truncated header");
  const std::uint64_t manifest_length = ReadU64LE(bytes, kContainerMagic.size());
  if (manifest_length > bytes.size() - kContainerHeaderSize) {
    Fail(source, "manifest length " + std::to_string(manifest_length) +
                     " exceeds file size");
  }

  Metadata json;
  try {
    json = Metadata::parse(bytes.substr(kContainerHeaderSize, manifest_length));
  } catch (const nlohmann::json::exception& e) {
    Fail(source, std::string("manifest is not valid JSON: ") + e.what());
  }

  Manifest manifest;
  manifest.blob_region_offset = kContainerHeaderSize + manifest_length;
  const std::uint64_t blob_size = bytes.size() - manifest.blob_region_offset;
  try {
    manifest.format_version = json.at("format_version").get<int>();
    if (manifest.format_version != kContainerFormatVersion) {
      Fail(source, "unsupported format_version " +
                       std::to_string(manifest.format_version));
    }
    if (json.contains("metadata")) {
      manifest.metadata = json.at("metadata");
      if (!manifest.metadata.is_object()) Fail(source, "metadata must be an object");
    }
    std::set<std::string> names;
    for (const auto& e : json.at("entries")) {
      ManifestEntry entry;
      entry.name = e.at("name").get<std::string>();
      entry.shape = e.at("shape").get<Shape>();
      entry.byte_offset = e.at("byte_offset").get<std::uint64_t>();
      entry.byte_length = e.at("byte_length").get<std::uint64_t>();
      const std::string where = "entry '" + entry.name + "': ";
      if (!names.insert(entry.name).second) Fail(source, where + "duplicate name");
      if (entry.shape.empty() || entry.shape.size() > 4 ||
          std::any_of(entry.shape.begin(), entry.shape.end(),
                      [](std::int64_t d) { return d < 1; })) {
        Fail(source, where + "invalid shape " + ShapeToString(entry.shape));
      }
      const auto expected = static_cast<std::uint64_t>(NumElements(entry.shape)) * 4;
      if (entry.byte_length != expected) {
        Fail(source, where + "byte_length " + std::to_string(entry.byte_length) +
                         " does not match shape " + ShapeToString(entry.shape) +
                         " (expected " + std::to_string(expected) + ")");
      }
      if (entry.byte_offset > blob_size ||
          entry.byte_length > blob_size - entry.byte_offset) {
        Fail(source, where + "byte range [" + std::to_string(entry.byte_offset) +
                         ", " + std::to_string(entry.byte_offset + entry.byte_length) +
                         ") exceeds blob region of " + std::to_string(blob_size) +
                         " bytes (truncated file?)");
      }
      manifest.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(source, std::string("malformed manifest: ") + e.what());
  }

  std::vector<const ManifestEntry*> by_offset;
  for (const auto& e : manifest.entries) by_offset.push_back(&e);
  std::stable_sort(by_offset.begin(), by_offset.end(),
                   [](const ManifestEntry* a, const ManifestEntry* b) {
                     return a->byte_offset < b->byte_offset;
                   });
  for (std::size_t i = 1; i < by_offset.size(); ++i) {
    const auto* prev = by_offset[i - 1];
    if (prev->byte_offset + prev->byte_length > by_offset[i]->byte_offset) {
      Fail(source, "entry '" + by_offset[i]->name + "': byte range overlaps entry '" +
                       prev->name + "'");
    }
  }
  return manifest;
}

Container DecodeContainer(std::string_view bytes, std::string_view source) {
  Manifest manifest = DecodeManifest(bytes, source);
  Container c;
  c.metadata = std::move(manifest.metadata);
  c.tensors.reserve(manifest.entries.size());
  for (auto& e : manifest.entries) {
    auto values = ReadFloatsLE(bytes, manifest.blob_region_offset + e.byte_offset,
                               e.byte_length / 4);
    c.tensors.emplace_back(std::move(e.name), std::move(e.shape), std::move(values));
  }
  return c;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return std::move(buf).str();
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void WriteContainer(std::span<const Tensor> tensors, const Metadata& metadata,
                    const std::filesystem::path& path) {
  WriteFileBytes(path, EncodeContainer(tensors, metadata));
}

Container ReadContainer(const std::filesystem::path& path) {
  return DecodeContainer(ReadFileBytes(path), path.string());
}

Manifest ReadManifest(const std::filesystem::path& path) {
  return DecodeManifest(ReadFileBytes(path), path.string());
}

}  // namespace sepq
