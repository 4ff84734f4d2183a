/* Copyright 2026 The EdgeCost Authors. All Rights Reserved.

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace edgecost {

/// One downloadable model. An empty sha256 means the digest is not pinned
/// and the download is accepted as-is (its digest is still recorded).
struct ZooEntry {
  std::string name;
  std::string url;
  std::string sha256;
  std::string description;
};

/// Built-in name -> URL table for the ONNX model zoo classification models.
std::span<const ZooEntry> builtin_registry();

/// Throws UnknownModel when `name` is absent.
const ZooEntry& find_zoo_entry(std::span<const ZooEntry> registry, const std::string& name);

struct ManifestEntry {
  std::string url;
  std::string sha256;
  uint64_t bytes = 0;
  std::string fetched_at;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

using CacheManifest = std::map<std::string, ManifestEntry>;

inline constexpr const char* kManifestFileName = "manifest.json";

CacheManifest read_manifest(const std::filesystem::path& cache_dir);
void write_manifest(const std::filesystem::path& cache_dir, const CacheManifest& manifest);

/// EDGECOST_CACHE if set, else $XDG_CACHE_HOME/edgecost, else ~/.cache/edgecost.
std::filesystem::path default_cache_dir();

/// Path a model occupies inside a cache directory.
std::filesystem::path cached_model_path(const std::filesystem::path& cache_dir, const std::string& name);

/// Copies `url` to `dest`. Must throw NetworkError on failure.
using Downloader = std::function<void(const std::string& url, const std::filesystem::path& dest)>;

/// libcurl-backed downloader; handles http(s) and file URLs.
void curl_download(const std::string& url, const std::filesystem::path& dest);

std::string sha256_file(const std::filesystem::path& path);

/// Returns the cached file for `name`, downloading it first when the cache
/// is cold. A warm cache (manifest entry present and file size matching)
/// never touches the downloader. Writes for one name are serialized with a
/// lock file, so concurrent callers download at most once.
std::filesystem::path fetch_model(const std::string& name, const std::filesystem::path& cache_dir,
                                  std::span<const ZooEntry> registry = builtin_registry(),
                                  const Downloader& download = curl_download);

}  // namespace edgecost
