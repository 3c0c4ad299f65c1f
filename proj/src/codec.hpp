#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "image.hpp"
#include "segmap.hpp"

namespace semwire {

enum class CodecFormat {
  Jpeg,
  WebpLossy,
  WebpLossless,
};

const char* codec_format_name(CodecFormat format);

// One encoded bitstream plus enough source geometry to decode it back to
// the original layout. quality is meaningful for the lossy formats only.
struct EncodedBlob {
  CodecFormat format = CodecFormat::Jpeg;
  int quality = 0;
  std::vector<uint8_t> bytes;
  int src_w = 0;
  int src_h = 0;
  int src_channels = 0;
};

// JPEG uses libjpeg's standard tables scaled by Q with 4:2:0 chroma
// subsampling; WebP single-channel inputs travel as replicated RGB and
// collapse back on decode.
EncodedBlob encode(const ImageBuffer& img, CodecFormat format, int quality);
ImageBuffer decode(const EncodedBlob& blob);

// Decode from raw bitstream bytes when only the container entry is at hand.
ImageBuffer decode_jpeg(std::span<const uint8_t> bytes);
ImageBuffer decode_webp(std::span<const uint8_t> bytes);

// Nearest-neighbor label resampling; labels are categorical, so no
// interpolation ever happens. Downsample requires target <= source,
// upsample requires target >= source.
SegMap downsample_segmap(const SegMap& seg, int target_w, int target_h);
SegMap upsample_segmap(const SegMap& seg, int target_w, int target_h);

}  // namespace semwire
