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

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "edgecost/errors.hpp"
#include "edgecost/zoo.hpp"
#include "onnx_writer.hpp"

using namespace edgecost;
using namespace edgecost::testing;

namespace {

// sha256("abc")
constexpr const char* kAbcDigest = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";

std::vector<ZooEntry> fake_registry() {
  return {
      {"tiny", "https://example.invalid/tiny.onnx", "", "unpinned"},
      {"pinned", "https://example.invalid/pinned.onnx", kAbcDigest, "pinned to 'abc'"},
      {"wrong", "https://example.invalid/wrong.onnx", kAbcDigest, "pinned, serves other bytes"},
  };
}

struct CountingDownloader {
  std::shared_ptr<std::atomic<int>> calls = std::make_shared<std::atomic<int>>(0);
  std::string payload = "abc";

  void operator()(const std::string&, const std::filesystem::path& dest) const {
    ++*calls;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    std::ofstream(dest, std::ios::binary) << payload;
  }
};

}  // namespace

TEST_CASE("registry lookups") {
  const auto registry = builtin_registry();
  CHECK(find_zoo_entry(registry, "squeezenet1.0").name == "squeezenet1.0");
  for (const char* name : {"alexnet", "vgg16", "mobilenetv2", "resnet50", "efficientnet-b0"}) {
    CHECK(find_zoo_entry(registry, name).url.find("https://") == 0);
  }
  CHECK_THROWS_AS(find_zoo_entry(registry, "not-a-model"), UnknownModel);
  CHECK_THROWS_AS(fetch_model("not-a-model", "/nonexistent"), UnknownModel);
}

TEST_CASE("sha256 of a file") {
  TempDir dir;
  std::ofstream(dir / "abc") << "abc";
  CHECK(sha256_file(dir / "abc") == kAbcDigest);
}

TEST_CASE("cold fetch downloads once, warm fetch never") {
  TempDir dir;
  const auto registry = fake_registry();
  CountingDownloader download;

  const auto path = fetch_model("tiny", dir.path(), registry, download);
  CHECK(path == dir / "tiny.onnx");
  CHECK(std::filesystem::file_size(path) == 3);
  CHECK(*download.calls == 1);

  const CacheManifest manifest = read_manifest(dir.path());
  REQUIRE(manifest.count("tiny") == 1);
  CHECK(manifest.at("tiny").bytes == 3);
  CHECK(manifest.at("tiny").url == registry[0].url);
  CHECK(manifest.at("tiny").sha256 == kAbcDigest);
  CHECK_FALSE(manifest.at("tiny").fetched_at.empty());

  CHECK(fetch_model("tiny", dir.path(), registry, download) == path);
  CHECK(*download.calls == 1);
}

TEST_CASE("pinned digests are verified") {
  TempDir dir;
  const auto registry = fake_registry();
  CountingDownloader good;
  CHECK_NOTHROW(fetch_model("pinned", dir.path(), registry, good));

  CountingDownloader bad;
  bad.payload = "abd";
  CHECK_THROWS_AS(fetch_model("wrong", dir.path(), registry, bad), ChecksumMismatch);
  CHECK_FALSE(std::filesystem::exists(dir / "wrong.onnx"));
  CHECK(read_manifest(dir.path()).count("wrong") == 0);
}

TEST_CASE("network failures leave the cache untouched") {
  TempDir dir;
  const auto registry = fake_registry();
  const Downloader failing = [](const std::string& url, const std::filesystem::path& dest) {
    std::ofstream(dest) << "partial";
    throw NetworkError("unreachable: " + url);
  };
  CHECK_THROWS_AS(fetch_model("tiny", dir.path(), registry, failing), NetworkError);
  CHECK_FALSE(std::filesystem::exists(dir / "tiny.onnx"));
  CHECK(read_manifest(dir.path()).empty());
}

TEST_CASE("concurrent fetches of one name download once") {
  TempDir dir;
  const auto registry = fake_registry();
  CountingDownloader download;
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] { fetch_model("tiny", dir.path(), registry, download); });
  }
  for (auto& t : threads) t.join();
  CHECK(*download.calls == 1);
  CHECK(read_manifest(dir.path()).size() == 1);
}

TEST_CASE("manifest round trip") {
  TempDir dir;
  CacheManifest m;
  m["a"] = {"https://x/a.onnx", "00ff", 12, "2026-01-01T00:00:00Z"};
  m["b"] = {"https://x/b.onnx", "", 7, "2026-01-02T00:00:00Z"};
  write_manifest(dir.path(), m);
  CHECK(read_manifest(dir.path()) == m);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
}

TEST_CASE("EDGECOST_CACHE overrides the default cache directory") {
  const char* old = std::getenv("EDGECOST_CACHE");
  const std::string saved = old ? old : "";
  setenv("EDGECOST_CACHE", "/tmp/edgecost-cache-test", 1);
  CHECK(default_cache_dir() == std::filesystem::path("/tmp/edgecost-cache-test"));
  if (old) {
    setenv("EDGECOST_CACHE", saved.c_str(), 1);
  } else {
    unsetenv("EDGECOST_CACHE");
  }
}
