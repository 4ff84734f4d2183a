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

#include "edgecost/zoo.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>
#include <mutex>

#include <nlohmann/json.hpp>

#include "edgecost/errors.hpp"

namespace edgecost {

namespace {

constexpr const char* kZooBase = "https://github.com/onnx/models/raw/main/validated/vision/classification/";

// Revisions pinned to the validated/ tree of github.com/onnx/models. Digests
// are left unpinned; see README ("Model registry").
const std::vector<ZooEntry>& registry_table() {
  static const std::vector<ZooEntry> table = {
      {"alexnet", std::string(kZooBase) + "alexnet/model/bvlcalexnet-12.onnx", "", "AlexNet (BVLC), opset 12"},
      {"vgg16", std::string(kZooBase) + "vgg/model/vgg16-12.onnx", "", "VGG-16, opset 12"},
      {"googlenet", std::string(kZooBase) + "inception_and_googlenet/googlenet/model/googlenet-12.onnx", "",
       "GoogLeNet / Inception V1, opset 12"},
      {"inception-v2", std::string(kZooBase) + "inception_and_googlenet/inception_v2/model/inception-v2-9.onnx",
       "", "Inception V2, opset 9"},
      {"resnet18", std::string(kZooBase) + "resnet/model/resnet18-v1-7.onnx", "", "ResNet-18 v1, opset 7"},
      {"resnet34", std::string(kZooBase) + "resnet/model/resnet34-v1-7.onnx", "", "ResNet-34 v1, opset 7"},
      {"resnet50", std::string(kZooBase) + "resnet/model/resnet50-v1-12.onnx", "", "ResNet-50 v1, opset 12"},
      {"resnet101", std::string(kZooBase) + "resnet/model/resnet101-v1-7.onnx", "", "ResNet-101 v1, opset 7"},
      {"resnet152", std::string(kZooBase) + "resnet/model/resnet152-v1-7.onnx", "", "ResNet-152 v1, opset 7"},
      {"densenet121", std::string(kZooBase) + "densenet-121/model/densenet-12.onnx", "", "DenseNet-121, opset 12"},
      {"squeezenet1.0", std::string(kZooBase) + "squeezenet/model/squeezenet1.0-12.onnx", "",
       "SqueezeNet 1.0, opset 12"},
      {"mobilenetv2", std::string(kZooBase) + "mobilenet/model/mobilenetv2-12.onnx", "", "MobileNet V2, opset 12"},
      {"shufflenetv2", std::string(kZooBase) + "shufflenet/model/shufflenet-v2-12.onnx", "",
       "ShuffleNet V2, opset 12"},
      {"efficientnet-b0", std::string(kZooBase) + "efficientnet-lite4/model/efficientnet-lite4-11.onnx", "",
       "EfficientNet (zoo ships Lite4), opset 11"},
  };
  return table;
}

// flock()-based exclusive lock; released on destruction.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw NetworkError("cannot create lock file " + path.string());
    }
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw NetworkError("cannot lock " + path.string());
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

bool cache_hit(const std::filesystem::path& cache_dir, const std::string& name) {
  const CacheManifest manifest = read_manifest(cache_dir);
  const auto it = manifest.find(name);
  if (it == manifest.end()) {
    return false;
  }
  std::error_code ec;
  const auto size = std::filesystem::file_size(cached_model_path(cache_dir, name), ec);
  return !ec && size == it->second.bytes;
}

}  // namespace

std::span<const ZooEntry> builtin_registry() { return registry_table(); }

const ZooEntry& find_zoo_entry(std::span<const ZooEntry> registry, const std::string& name) {
  for (const ZooEntry& e : registry) {
    if (e.name == name) {
      return e;
    }
  }
  throw UnknownModel("'" + name + "' is not in the model registry");
}

CacheManifest read_manifest(const std::filesystem::path& cache_dir) {
  CacheManifest manifest;
  std::ifstream in(cache_dir / kManifestFileName);
  if (!in) {
    return manifest;
  }
  const nlohmann::json doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) {
    return manifest;  // unreadable manifest == empty cache
  }
  for (const auto& [name, e] : doc.items()) {
    if (!e.is_object()) {
      continue;
    }
    manifest[name] = ManifestEntry{e.value("url", ""), e.value("sha256", ""), e.value("bytes", uint64_t{0}),
                                   e.value("fetched_at", "")};
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& cache_dir, const CacheManifest& manifest) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [name, e] : manifest) {
    doc[name] = {{"url", e.url}, {"sha256", e.sha256}, {"bytes", e.bytes}, {"fetched_at", e.fetched_at}};
  }
  const auto tmp = cache_dir / (std::string(kManifestFileName) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) {
      throw NetworkError("cannot write manifest in " + cache_dir.string());
    }
  }
  std::filesystem::rename(tmp, cache_dir / kManifestFileName);
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("EDGECOST_CACHE"); env != nullptr && *env != '\0') {
    return env;
  }
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg != nullptr && *xdg != '\0') {
    return std::filesystem::path(xdg) / "edgecost";
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return std::filesystem::path(home) / ".cache" / "edgecost";
  }
  return std::filesystem::current_path() / ".edgecost-cache";
}

std::filesystem::path cached_model_path(const std::filesystem::path& cache_dir, const std::string& name) {
  return cache_dir / (name + ".onnx");
}

void curl_download(const std::string& url, const std::filesystem::path& dest) {
  static std::once_flag init;
  std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });

  std::unique_ptr<std::FILE, decltype(&std::fclose)> out(std::fopen(dest.c_str(), "wb"), &std::fclose);
  if (!out) {
    throw NetworkError("cannot open " + dest.string() + " for writing");
  }
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), &curl_easy_cleanup);
  if (!curl) {
    throw NetworkError("curl_easy_init failed");
  }
  std::array<char, CURL_ERROR_SIZE> err{};
  curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, out.get());
  curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, err.data());
  const CURLcode rc = curl_easy_perform(curl.get());
  if (rc != CURLE_OK) {
    throw NetworkError("download of " + url + " failed: " + (err[0] != '\0' ? err.data() : curl_easy_strerror(rc)));
  }
  if (std::fflush(out.get()) != 0) {
    throw NetworkError("short write to " + dest.string());
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FileNotFound("file not found: " + path.string());
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xf];
  }
  return hex;
}

std::filesystem::path fetch_model(const std::string& name, const std::filesystem::path& cache_dir,
                                  std::span<const ZooEntry> registry, const Downloader& download) {
  const ZooEntry& entry = find_zoo_entry(registry, name);
  const auto target = cached_model_path(cache_dir, name);
  if (cache_hit(cache_dir, name)) {
    return target;
  }

  std::filesystem::create_directories(cache_dir);
  const FileLock name_lock(cache_dir / ("." + name + ".lock"));
  if (cache_hit(cache_dir, name)) {
    return target;  // another writer finished while we waited
  }

  const auto part = cache_dir / (name + ".onnx.part");
  try {
    download(entry.url, part);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(part, ec);
    throw;
  }
  const std::string digest = sha256_file(part);
  if (!entry.sha256.empty() && digest != entry.sha256) {
    std::filesystem::remove(part);
    throw ChecksumMismatch("sha256 of " + entry.url + " is " + digest + ", registry pins " + entry.sha256);
  }
  const uint64_t bytes = std::filesystem::file_size(part);
  std::filesystem::rename(part, target);

  const FileLock manifest_lock(cache_dir / ".manifest.lock");
  CacheManifest manifest = read_manifest(cache_dir);
  manifest[name] = ManifestEntry{entry.url, digest, bytes, utc_now()};
  write_manifest(cache_dir, manifest);
  return target;
}

}  // namespace edgecost
