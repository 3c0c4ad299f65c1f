#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "caption.hpp"
#include "container.hpp"
#include "image.hpp"
#include "segmap.hpp"

namespace semwire {

struct MmsdOptions {
  // Downsample target for the segmentation entry; clamped to the source
  // dimensions for small images.
  int seg_target_w = 1024;
  int seg_target_h = 512;
  double canny_low = 100.0;
  double canny_high = 200.0;
};

struct MmsdMeta {
  int orig_w = 0;
  int orig_h = 0;
  int seg_w = 0;
  int seg_h = 0;
  double canny_low = 0.0;
  double canny_high = 0.0;
  int num_classes = 0;
};

// Sender side: segmentation (downsampled, WebP-lossless) + edge map
// (full resolution, WebP-lossless) + caption + metadata, in one container.
PayloadContainer mmsd_pack(const ImageBuffer& img, const SegMap& seg,
                           const Caption& caption,
                           const MmsdOptions& opts = {});

struct MmsdUnpacked {
  SegMap seg_full;     // upsampled back to the original resolution
  ImageBuffer edges;   // single-channel, full resolution
  Caption caption;
  MmsdMeta meta;
};

MmsdUnpacked mmsd_unpack(const PayloadContainer& container,
                         std::shared_ptr<const ClassTaxonomy> taxonomy);

// Reassembles a container from unpacked components. Byte-identical to the
// original container for any container produced by mmsd_pack.
PayloadContainer mmsd_repack(const MmsdUnpacked& unpacked);

// Ratio of the original file size on disk to the serialized container
// size. Corpus-level figures average these per-image ratios.
double compression_ratio(const std::filesystem::path& original_path,
                         const PayloadContainer& payload);

// Writes seg/edge/caption files an external reconstruction command can
// consume; returns the paths (keyed "seg", "edge", "caption", "met").
struct MmsdExportPaths {
  std::filesystem::path seg;
  std::filesystem::path edge;
  std::filesystem::path caption;
  std::filesystem::path meta;
};
MmsdExportPaths mmsd_export(const MmsdUnpacked& unpacked,
                            const std::filesystem::path& dir,
                            const std::string& stem);

// Runs a reconstruction command template over exported components.
// Placeholders {seg} {edge} {caption} {out} are substituted; the output
// image must exist afterwards with the original dimensions.
ImageBuffer run_reconstruct_cmd(const std::string& cmd_template,
                                const MmsdUnpacked& unpacked,
                                const std::filesystem::path& workdir);

}  // namespace semwire
