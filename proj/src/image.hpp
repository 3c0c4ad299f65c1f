#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "error.hpp"

namespace semwire {

// 8-bit raster with interleaved row-major samples. channels is 1 (gray)
// or 3 (RGB); data.size() == width * height * channels always holds.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> data;

  static ImageBuffer create(int width, int height, int channels,
                            uint8_t fill = 0);

  size_t index(int x, int y, int c) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }

  uint8_t at(int x, int y, int c) const { return data[index(x, y, c)]; }
  uint8_t& at(int x, int y, int c) { return data[index(x, y, c)]; }

  size_t sample_count() const { return data.size(); }

  bool same_shape(const ImageBuffer& other) const {
    return width == other.width && height == other.height &&
           channels == other.channels;
  }

  void validate() const;
};

}  // namespace semwire
