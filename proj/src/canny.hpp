#pragma once

#include <cstdint>
#include <vector>

#include "image.hpp"

namespace semwire {

// Thresholds applied to the raw Euclidean Sobel magnitude (no
// normalization), matching the common library default of 100/200.
inline constexpr double kDefaultCannyLow = 100.0;
inline constexpr double kDefaultCannyHigh = 200.0;

// BT.601 luma, rounded: luma = round(0.299 R + 0.587 G + 0.114 B).
// Single-channel input is returned unchanged.
ImageBuffer to_grayscale(const ImageBuffer& img);

// Intermediate planes, exposed for tests that check per-stage invariants.
struct CannyStages {
  int width = 0;
  int height = 0;
  std::vector<float> magnitude;   // Euclidean Sobel magnitude
  std::vector<uint8_t> direction; // quantized gradient direction, 4 bins
  std::vector<uint8_t> nms_kept;  // 1 where the pixel survived suppression
};

// Canny pipeline: 5x5 Gaussian blur (sigma 1.4, replicate border) ->
// 3x3 Sobel -> non-maximum suppression over 4 direction bins ->
// double-threshold hysteresis with 8-connectivity. Output pixels are
// exactly 0 or 255 at the source resolution.
ImageBuffer canny(const ImageBuffer& gray, double low, double high,
                  CannyStages* stages = nullptr);

}  // namespace semwire
