#include "codec.hpp"

#include <csetjmp>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <webp/decode.h>
#include <webp/encode.h>

#include "error.hpp"

namespace semwire {

namespace {

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  longjmp(err->jump, 1);
}

std::vector<uint8_t> encode_jpeg(const ImageBuffer& img, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_on_error;
  err.message[0] = '\0';

  unsigned char* buffer = nullptr;
  unsigned long buffer_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (buffer) free(buffer);
    raise(ErrorCode::Codec, std::string("JPEG encode failed: ") + err.message);
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = img.channels;
  cinfo.in_color_space = img.channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);  // YCbCr with 2x2 (4:2:0) subsampling for RGB
  jpeg_set_quality(&cinfo, quality, TRUE);
  cinfo.optimize_coding = TRUE;  // per-image Huffman tables, baseline stream
  jpeg_start_compress(&cinfo, TRUE);

  size_t stride = static_cast<size_t>(img.width) * img.channels;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(
        img.data.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<uint8_t> out(buffer, buffer + buffer_size);
  free(buffer);
  return out;
}

ImageBuffer decode_jpeg_or_raise(std::span<const uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_on_error;
  err.message[0] = '\0';

  ImageBuffer img;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    raise(ErrorCode::Codec, std::string("JPEG decode failed: ") + err.message);
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), bytes.size());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space =
      (cinfo.num_components == 1) ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  img = ImageBuffer::create(static_cast<int>(cinfo.output_width),
                            static_cast<int>(cinfo.output_height),
                            cinfo.output_components);
  size_t stride = static_cast<size_t>(img.width) * img.channels;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.data.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

std::vector<uint8_t> to_rgb_samples(const ImageBuffer& img) {
  if (img.channels == 3) return img.data;
  std::vector<uint8_t> rgb(static_cast<size_t>(img.width) * img.height * 3);
  for (size_t i = 0, n = img.data.size(); i < n; ++i) {
    rgb[i * 3] = rgb[i * 3 + 1] = rgb[i * 3 + 2] = img.data[i];
  }
  return rgb;
}

std::vector<uint8_t> encode_webp(const ImageBuffer& img, int quality,
                                 bool lossless) {
  std::vector<uint8_t> rgb = to_rgb_samples(img);
  int stride = img.width * 3;
  uint8_t* output = nullptr;
  size_t size =
      lossless
          ? WebPEncodeLosslessRGB(rgb.data(), img.width, img.height, stride,
                                  &output)
          : WebPEncodeRGB(rgb.data(), img.width, img.height, stride,
                          static_cast<float>(quality), &output);
  if (size == 0 || !output) {
    if (output) WebPFree(output);
    raise(ErrorCode::Codec, "WebP encode failed");
  }
  std::vector<uint8_t> out(output, output + size);
  WebPFree(output);
  return out;
}

ImageBuffer decode_webp_or_raise(std::span<const uint8_t> bytes) {
  int w = 0, h = 0;
  if (!WebPGetInfo(bytes.data(), bytes.size(), &w, &h))
    raise(ErrorCode::Codec, "not a decodable WebP bitstream");
  uint8_t* rgb = WebPDecodeRGB(bytes.data(), bytes.size(), &w, &h);
  if (!rgb) raise(ErrorCode::Codec, "WebP decode failed");
  ImageBuffer img = ImageBuffer::create(w, h, 3);
  std::memcpy(img.data.data(), rgb, img.data.size());
  WebPFree(rgb);
  return img;
}

// The WebP path carries gray images as replicated RGB; fold them back.
ImageBuffer collapse_to_gray(const ImageBuffer& rgb) {
  ImageBuffer gray = ImageBuffer::create(rgb.width, rgb.height, 1);
  const size_t n = static_cast<size_t>(rgb.width) * rgb.height;
  for (size_t i = 0; i < n; ++i) {
    int sum = rgb.data[i * 3] + rgb.data[i * 3 + 1] + rgb.data[i * 3 + 2];
    gray.data[i] = static_cast<uint8_t>((sum + 1) / 3);
  }
  return gray;
}

// Center-aligned nearest neighbor: src = floor((dst + 0.5) * src/dst).
// Unlike the plain floor mapping this makes downsample(upsample(x)) the
// identity whenever target <= source, which the repack path relies on.
size_t resample_index(int dst, int dst_dim, int src_dim) {
  return static_cast<size_t>(
      (static_cast<int64_t>(2 * dst + 1) * src_dim) / (2 * dst_dim));
}

SegMap resample_segmap(const SegMap& seg, int target_w, int target_h) {
  std::vector<uint8_t> labels(static_cast<size_t>(target_w) * target_h);
  for (int y = 0; y < target_h; ++y) {
    size_t sy = resample_index(y, target_h, seg.height);
    for (int x = 0; x < target_w; ++x) {
      size_t sx = resample_index(x, target_w, seg.width);
      labels[static_cast<size_t>(y) * target_w + x] =
          seg.labels[sy * seg.width + sx];
    }
  }
  return SegMap::from_labels(target_w, target_h, std::move(labels),
                             seg.taxonomy);
}

}  // namespace

const char* codec_format_name(CodecFormat format) {
  switch (format) {
    case CodecFormat::Jpeg: return "jpeg";
    case CodecFormat::WebpLossy: return "webp";
    case CodecFormat::WebpLossless: return "webp-lossless";
  }
  return "unknown";
}

EncodedBlob encode(const ImageBuffer& img, CodecFormat format, int quality) {
  img.validate();
  if (format != CodecFormat::WebpLossless && (quality < 1 || quality > 100))
    raise(ErrorCode::InvalidArgument,
          "quality must lie in [1, 100], got " + std::to_string(quality));

  EncodedBlob blob;
  blob.format = format;
  blob.quality = format == CodecFormat::WebpLossless ? 0 : quality;
  blob.src_w = img.width;
  blob.src_h = img.height;
  blob.src_channels = img.channels;
  switch (format) {
    case CodecFormat::Jpeg:
      blob.bytes = encode_jpeg(img, quality);
      break;
    case CodecFormat::WebpLossy:
      blob.bytes = encode_webp(img, quality, false);
      break;
    case CodecFormat::WebpLossless:
      blob.bytes = encode_webp(img, 0, true);
      break;
  }
  if (blob.bytes.empty()) raise(ErrorCode::Codec, "encoder produced no bytes");
  return blob;
}

ImageBuffer decode(const EncodedBlob& blob) {
  ImageBuffer img;
  switch (blob.format) {
    case CodecFormat::Jpeg:
      img = decode_jpeg_or_raise(blob.bytes);
      break;
    case CodecFormat::WebpLossy:
    case CodecFormat::WebpLossless:
      img = decode_webp_or_raise(blob.bytes);
      if (blob.src_channels == 1) img = collapse_to_gray(img);
      break;
  }
  if (blob.src_w && (img.width != blob.src_w || img.height != blob.src_h))
    raise(ErrorCode::Codec,
          "decoded dimensions do not match the recorded source dimensions");
  return img;
}

ImageBuffer decode_jpeg(std::span<const uint8_t> bytes) {
  return decode_jpeg_or_raise(bytes);
}

ImageBuffer decode_webp(std::span<const uint8_t> bytes) {
  return decode_webp_or_raise(bytes);
}

SegMap downsample_segmap(const SegMap& seg, int target_w, int target_h) {
  seg.validate();
  if (target_w <= 0 || target_h <= 0 || target_w > seg.width ||
      target_h > seg.height)
    raise(ErrorCode::Dimension,
          "downsample target must satisfy 0 < target <= source");
  return resample_segmap(seg, target_w, target_h);
}

SegMap upsample_segmap(const SegMap& seg, int target_w, int target_h) {
  seg.validate();
  if (target_w < seg.width || target_h < seg.height)
    raise(ErrorCode::Dimension, "upsample target must satisfy target >= source");
  return resample_segmap(seg, target_w, target_h);
}

}  // namespace semwire
