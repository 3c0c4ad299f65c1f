#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "image.hpp"
#include "segmap.hpp"

namespace semwire {

// Non-overlapping 8x8 patch grid covering the image. Edge patches may be
// partial when dimensions are not divisible by 8; all per-patch work
// operates on the intersection with the image.
struct PatchGrid {
  static constexpr int kPatch = 8;

  int n_h = 0;
  int n_w = 0;
  int image_w = 0;
  int image_h = 0;

  static PatchGrid for_image(int width, int height);

  int patch_count() const { return n_h * n_w; }

  // Pixel bounds of patch (i, j), clipped to the image: [x0, x1) x [y0, y1).
  struct Rect {
    int x0, y0, x1, y1;
  };
  Rect patch_rect(int i, int j) const;
};

// Per-group Bernoulli drop probabilities. Presets 0/2/4/7 carry the
// published values; the remaining indices interpolate monotonically
// between them.
struct MaskConfig {
  int id = -1;
  std::array<double, kNumGroups> rho{};

  double rho_for(SemanticGroup group) const {
    return rho[static_cast<int>(group)];
  }

  static MaskConfig preset(int id);
  // Text format: "<group> <probability>" per line, '#' comments.
  static MaskConfig parse(std::string_view text, int id = -1);
  static MaskConfig load(const std::filesystem::path& path, int id = -1);

  void validate() const;
};

inline constexpr int kNumConfigPresets = 8;

// Realized binary mask over the patch grid; 1 = patch dropped. Bit-exact
// regeneration from (inputs, seed) is guaranteed by the counter RNG.
struct PatchMask {
  int n_h = 0;
  int n_w = 0;
  std::vector<uint8_t> bits;
  uint64_t seed = 0;

  bool at(int i, int j) const {
    return bits[static_cast<size_t>(i) * n_w + j] != 0;
  }
  void set(int i, int j, bool v) {
    bits[static_cast<size_t>(i) * n_w + j] = v ? 1 : 0;
  }
  size_t count() const;

  static PatchMask empty(int n_h, int n_w, uint64_t seed = 0);
};

// Majority-vote class of patch (i, j); ties break to the smallest id.
int dominant_class(const SegMap& seg, const PatchGrid& grid, int i, int j);

// One Bernoulli draw per patch with p = rho[group(dominant class)],
// deterministic in (seed, patch index).
PatchMask semantic_mask(const SegMap& seg, const MaskConfig& config,
                        const PatchGrid& grid, uint64_t seed);

// Exactly floor(rho * n_h * n_w) distinct patches, uniform without
// replacement. The training-style distribution; intentionally different
// from the per-patch Bernoulli of semantic_mask.
PatchMask random_mask(const PatchGrid& grid, double rho, uint64_t seed);

// Zero-fills masked patches in every channel; unmasked bytes pass through
// untouched.
ImageBuffer apply_mask(const ImageBuffer& img, const PatchMask& mask);

// Run-length coding over row-major bits: one leading byte with the first
// bit value, then LEB128 run lengths of alternating value.
std::vector<uint8_t> mask_to_rle(const PatchMask& mask);
PatchMask rle_to_mask(std::span<const uint8_t> bytes, int n_h, int n_w);

}  // namespace semwire
