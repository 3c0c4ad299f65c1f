#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "image.hpp"

namespace semwire {

// 10*log10(255^2 / MSE) over all samples of both images jointly
// (RGB channels included, not luma-only). Identical images return +inf.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Single-scale SSIM on luma: 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, valid windows only.
double ssim_single_scale(const ImageBuffer& a, const ImageBuffer& b);

struct MsSsimResult {
  double value = 0.0;
  int scales_used = 0;   // 5 unless the image is too small
  bool reduced = false;  // true when fewer than 5 scales were possible
};

// Multi-scale SSIM on luma with the canonical five scale weights
// (normalized to sum 1) and 2x2 mean-pool downsampling between scales.
// Images smaller than 176 px on a side fall back to fewer scales with
// renormalized weights; the result flags the reduction.
MsSsimResult ms_ssim_detailed(const ImageBuffer& a, const ImageBuffer& b);
double ms_ssim(const ImageBuffer& a, const ImageBuffer& b);

double bpp(size_t payload_bytes, int width, int height);

// One rate-distortion operating point. quality_metrics_valid is false for
// payload-accounting rows (mmsd mode), where psnr/ms_ssim carry NaN.
struct RdRecord {
  std::string image;
  std::string mode;     // "jpeg", "samr" or "mmsd"
  int config = -1;      // -1 when the mode has no masking config
  int quality = 0;      // 0 when the mode has no quality factor
  uint64_t bytes = 0;
  double bpp = 0.0;
  double psnr_db = 0.0;
  double ms_ssim = 0.0;

  // Sort key: (image, mode, config, quality).
  bool operator<(const RdRecord& other) const;
  bool operator==(const RdRecord& other) const;
};

// CSV schema, fixed column order. PSNR of identical images serializes as
// the string "inf"; payload-only rows carry "nan" in both quality columns.
std::string rd_csv_header();
std::string rd_csv_line(const RdRecord& record);
RdRecord rd_csv_parse_line(const std::string& line);

void write_rd_csv(const std::filesystem::path& path,
                  const std::vector<RdRecord>& records);
std::vector<RdRecord> read_rd_csv(const std::filesystem::path& path);

}  // namespace semwire
