#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "image.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"

namespace semwire::testing {

// Unique scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& name) {
    auto base = std::filesystem::temp_directory_path() / "semwire_tests";
    std::filesystem::create_directories(base);
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / (name + "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline ImageBuffer gradient_image(int w, int h, int channels) {
  ImageBuffer img = ImageBuffer::create(w, h, channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c)
        img.at(x, y, c) = static_cast<uint8_t>((x * 3 + y * 7 + c * 31) % 256);
  return img;
}

inline ImageBuffer noise_image(int w, int h, int channels, uint64_t seed) {
  CounterRng rng(seed);
  ImageBuffer img = ImageBuffer::create(w, h, channels);
  for (size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<uint8_t>(rng.bits(0, i) & 0xFF);
  return img;
}

// Eight classes, one per semantic group, class id == group index.
inline std::shared_ptr<const ClassTaxonomy> group_taxonomy() {
  auto tax = std::make_shared<ClassTaxonomy>();
  for (int g = 0; g < kNumGroups; ++g) {
    tax->names.push_back(group_name(static_cast<SemanticGroup>(g)));
    tax->group_of.push_back(static_cast<SemanticGroup>(g));
  }
  return tax;
}

}  // namespace semwire::testing
