#pragma once

#include <filesystem>
#include <vector>

namespace semwire {

// Renders the three rate-distortion charts (BPP vs PSNR, BPP vs MS-SSIM,
// BPP vs bytes) from a sweep CSV as standalone SVG files with a
// logarithmic BPP axis and one series per (mode, config). Returns the
// written paths.
std::vector<std::filesystem::path> plot_rd(
    const std::filesystem::path& csv_path,
    const std::filesystem::path& output_dir);

}  // namespace semwire
