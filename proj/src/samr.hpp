#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "codec.hpp"
#include "container.hpp"
#include "image.hpp"
#include "masking.hpp"
#include "segmap.hpp"

namespace semwire {

// Receiver-side mask detection threshold on mean patch intensity.
inline constexpr double kDefaultDetectTau = 12.0;

inline constexpr int kInpaintMaxIter = 5000;
inline constexpr double kInpaintTol = 0.1;

struct SamrMeta {
  int orig_w = 0;
  int orig_h = 0;
  int config_id = -1;
  int quality = 0;
  uint64_t seed = 0;
  int n_h = 0;
  int n_w = 0;
};

// The transmitted SAMR unit: masked JPEG plus metadata, with an optional
// exact run-length mask side channel (counted in the payload when used).
struct SamrBitstream {
  EncodedBlob jpeg;
  std::optional<std::vector<uint8_t>> mask_rle;
  SamrMeta meta;

  PayloadContainer to_container() const;
  static SamrBitstream from_container(const PayloadContainer& container);
};

SamrBitstream samr_encode(const ImageBuffer& img, const SegMap& seg,
                          const MaskConfig& config, int quality, uint64_t seed,
                          bool with_mask_side_channel = false);

// Marks a patch masked when its mean absolute intensity across channels
// is at most tau. Genuinely black content is an accepted false positive.
PatchMask detect_mask(const ImageBuffer& decoded, const PatchGrid& grid,
                      double tau = kDefaultDetectTau);

struct InpaintResult {
  ImageBuffer image;
  // Converged solution before quantization, interleaved like the image;
  // lets verification compare against direct solves without the +/-0.5
  // rounding floor.
  std::vector<float> solution;
  int iterations = 0;
  bool converged = true;
};

// Fills masked pixels with the discrete harmonic interpolant: each masked
// pixel converges to the mean of its 4-neighbors with unmasked pixels as
// Dirichlet boundary. Red-black Gauss-Seidel, coarse-to-fine initial
// guess, stops when the largest per-pixel update drops below tol.
// Unmasked pixels pass through byte-identical.
InpaintResult inpaint_harmonic(const ImageBuffer& decoded,
                               const PatchMask& mask,
                               int max_iter = kInpaintMaxIter,
                               double tol = kInpaintTol);

struct Reconstructor {
  enum class Kind { Harmonic, External };
  Kind kind = Kind::Harmonic;
  std::string command;  // template with {in} {mask} {out} placeholders

  static Reconstructor harmonic() { return {}; }
  static Reconstructor external(std::string cmd) {
    return {Kind::External, std::move(cmd)};
  }
  // Accepts "harmonic" or "ext:<command template>".
  static Reconstructor parse(const std::string& spec);
};

// Receiver pipeline: decode, recover the mask (side channel when present,
// threshold detection otherwise), reconstruct.
ImageBuffer samr_decode(const SamrBitstream& bs, const Reconstructor& rec,
                        const std::filesystem::path& workdir = {});

// Mask-weighted L1: w_masked * mean|a-b| over masked samples plus
// w_unmasked * mean|a-b| over unmasked samples; empty regions contribute 0.
double masked_l1(const ImageBuffer& pred, const ImageBuffer& target,
                 const PatchMask& mask, double w_masked = 0.7,
                 double w_unmasked = 0.3);

}  // namespace semwire
