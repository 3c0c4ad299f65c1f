#include "canny.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace semwire {

namespace {

constexpr int kKernelRadius = 2;  // 5x5 Gaussian
constexpr double kSigma = 1.4;

inline int clamp_coord(int v, int n) { return std::clamp(v, 0, n - 1); }

std::vector<float> gaussian_blur(const ImageBuffer& gray) {
  float kernel[5][5];
  float sum = 0.0f;
  for (int dy = -kKernelRadius; dy <= kKernelRadius; ++dy) {
    for (int dx = -kKernelRadius; dx <= kKernelRadius; ++dx) {
      float v = static_cast<float>(
          std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma)));
      kernel[dy + kKernelRadius][dx + kKernelRadius] = v;
      sum += v;
    }
  }
  for (auto& row : kernel)
    for (float& v : row) v /= sum;

  const int w = gray.width, h = gray.height;
  std::vector<float> out(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int dy = -kKernelRadius; dy <= kKernelRadius; ++dy) {
        int sy = clamp_coord(y + dy, h);
        for (int dx = -kKernelRadius; dx <= kKernelRadius; ++dx) {
          int sx = clamp_coord(x + dx, w);
          acc += kernel[dy + kKernelRadius][dx + kKernelRadius] *
                 gray.data[static_cast<size_t>(sy) * w + sx];
        }
      }
      out[static_cast<size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

// Direction bins over [0, 180): 0 = horizontal gradient (vertical edge),
// 1 = 45 deg, 2 = vertical gradient, 3 = 135 deg. Each bin names the two
// neighbors that lie along the gradient.
struct BinOffsets {
  int dx1, dy1;  // negative side
  int dx2, dy2;  // positive side
};

constexpr BinOffsets kBinOffsets[4] = {
    {-1, 0, 1, 0},
    {-1, -1, 1, 1},
    {0, -1, 0, 1},
    {1, -1, -1, 1},
};

uint8_t quantize_direction(float gx, float gy) {
  double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
  if (angle < 0) angle += 180.0;
  if (angle >= 180.0) angle -= 180.0;
  if (angle < 22.5 || angle >= 157.5) return 0;
  if (angle < 67.5) return 1;
  if (angle < 112.5) return 2;
  return 3;
}

}  // namespace

ImageBuffer to_grayscale(const ImageBuffer& img) {
  img.validate();
  if (img.channels == 1) return img;
  ImageBuffer gray = ImageBuffer::create(img.width, img.height, 1);
  const size_t n = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < n; ++i) {
    double luma = 0.299 * img.data[i * 3] + 0.587 * img.data[i * 3 + 1] +
                  0.114 * img.data[i * 3 + 2];
    gray.data[i] =
        static_cast<uint8_t>(std::clamp(std::lround(luma), 0l, 255l));
  }
  return gray;
}

ImageBuffer canny(const ImageBuffer& gray, double low, double high,
                  CannyStages* stages) {
  gray.validate();
  if (gray.channels != 1)
    raise(ErrorCode::InvalidArgument, "canny expects a single-channel image");
  if (gray.width < 2 * kKernelRadius + 1 || gray.height < 2 * kKernelRadius + 1)
    raise(ErrorCode::Dimension, "image smaller than the 5x5 kernel support");
  if (low < 0 || high < low)
    raise(ErrorCode::InvalidArgument, "thresholds must satisfy 0 <= low <= high");

  const int w = gray.width, h = gray.height;
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<float> blurred = gaussian_blur(gray);

  std::vector<float> magnitude(n);
  std::vector<uint8_t> direction(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto sample = [&](int dx, int dy) {
        return blurred[static_cast<size_t>(clamp_coord(y + dy, h)) * w +
                       clamp_coord(x + dx, w)];
      };
      float gx = sample(1, -1) + 2.0f * sample(1, 0) + sample(1, 1) -
                 sample(-1, -1) - 2.0f * sample(-1, 0) - sample(-1, 1);
      float gy = sample(-1, 1) + 2.0f * sample(0, 1) + sample(1, 1) -
                 sample(-1, -1) - 2.0f * sample(0, -1) - sample(1, -1);
      size_t idx = static_cast<size_t>(y) * w + x;
      magnitude[idx] = std::hypot(gx, gy);
      direction[idx] = quantize_direction(gx, gy);
    }
  }

  // Non-maximum suppression. A pixel survives when its magnitude is
  // strictly above the neighbor on the negative side and at least the
  // neighbor on the positive side; the asymmetry thins two-pixel plateaus
  // to a single line.
  std::vector<uint8_t> kept(n, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      size_t idx = static_cast<size_t>(y) * w + x;
      float m = magnitude[idx];
      if (m <= 0.0f) continue;
      const BinOffsets& o = kBinOffsets[direction[idx]];
      auto mag_at = [&](int nx, int ny) -> float {
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) return 0.0f;
        return magnitude[static_cast<size_t>(ny) * w + nx];
      };
      float m1 = mag_at(x + o.dx1, y + o.dy1);
      float m2 = mag_at(x + o.dx2, y + o.dy2);
      if (m > m1 && m >= m2) kept[idx] = 1;
    }
  }

  // Hysteresis: seed from strong pixels, grow through weak ones,
  // 8-connectivity.
  ImageBuffer edges = ImageBuffer::create(w, h, 1);
  std::vector<size_t> stack;
  for (size_t i = 0; i < n; ++i) {
    if (kept[i] && magnitude[i] >= high && edges.data[i] == 0) {
      edges.data[i] = 255;
      stack.push_back(i);
      while (!stack.empty()) {
        size_t cur = stack.back();
        stack.pop_back();
        int cy = static_cast<int>(cur / w);
        int cx = static_cast<int>(cur % w);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            size_t ni = static_cast<size_t>(ny) * w + nx;
            if (edges.data[ni] == 0 && kept[ni] && magnitude[ni] >= low) {
              edges.data[ni] = 255;
              stack.push_back(ni);
            }
          }
        }
      }
    }
  }

  if (stages) {
    stages->width = w;
    stages->height = h;
    stages->magnitude = std::move(magnitude);
    stages->direction = std::move(direction);
    stages->nms_kept = std::move(kept);
  }
  return edges;
}

}  // namespace semwire
