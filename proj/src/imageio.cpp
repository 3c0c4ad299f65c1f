#include "imageio.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "error.hpp"

namespace semwire {

namespace {

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

struct MemorySource {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<MemorySource*>(png_get_io_ptr(png));
  if (src->pos + count > src->size) png_error(png, "read past end of PNG data");
  std::memcpy(out, src->data + src->pos, count);
  src->pos += count;
}

void png_on_error(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  if (message && message->empty()) *message = msg;
  longjmp(png_jmpbuf(png), 1);
}

void png_on_warning(png_structp, png_const_charp) {}

ImageBuffer decode_png(std::span<const uint8_t> bytes) {
  std::string error_message;
  PngReader reader;
  reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error_message,
                                      png_on_error, png_on_warning);
  if (!reader.png) raise(ErrorCode::Internal, "png_create_read_struct failed");
  reader.info = png_create_info_struct(reader.png);
  if (!reader.info) raise(ErrorCode::Internal, "png_create_info_struct failed");

  // setjmp frame: no C++ objects with destructors below this point.
  ImageBuffer img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(reader.png)))
    raise(ErrorCode::Format, "PNG decode failed: " + error_message);

  MemorySource src{bytes.data(), bytes.size(), 0};
  png_set_read_fn(reader.png, &src, png_mem_read);
  png_read_info(reader.png, reader.info);

  png_uint_32 width = png_get_image_width(reader.png, reader.info);
  png_uint_32 height = png_get_image_height(reader.png, reader.info);
  int bit_depth = png_get_bit_depth(reader.png, reader.info);
  int color_type = png_get_color_type(reader.png, reader.info);

  if (bit_depth == 16) png_set_strip_16(reader.png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(reader.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(reader.png);
  if (png_get_valid(reader.png, reader.info, PNG_INFO_tRNS))
    png_set_tRNS_to_alpha(reader.png);
  png_set_strip_alpha(reader.png);
  png_read_update_info(reader.png, reader.info);

  color_type = png_get_color_type(reader.png, reader.info);
  int channels =
      (color_type == PNG_COLOR_TYPE_GRAY) ? 1 : 3;

  img = ImageBuffer::create(static_cast<int>(width), static_cast<int>(height),
                            channels);
  rows.resize(height);
  size_t stride = static_cast<size_t>(width) * channels;
  for (png_uint_32 y = 0; y < height; ++y)
    rows[y] = img.data.data() + y * stride;
  png_read_image(reader.png, rows.data());
  png_read_end(reader.png, nullptr);
  return img;
}

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

ImageBuffer decode_jpeg_bytes(std::span<const uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_on_error;
  err.message[0] = '\0';

  ImageBuffer img;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    raise(ErrorCode::Format, std::string("JPEG decode failed: ") + err.message);
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), bytes.size());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space =
      (cinfo.num_components == 1) ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);

  int channels = cinfo.output_components;
  img = ImageBuffer::create(static_cast<int>(cinfo.output_width),
                            static_cast<int>(cinfo.output_height), channels);
  size_t stride = static_cast<size_t>(img.width) * channels;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.data.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

bool looks_like_png(std::span<const uint8_t> bytes) {
  static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

bool looks_like_jpeg(std::span<const uint8_t> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 &&
         bytes[2] == 0xFF;
}

}  // namespace

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open file: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open for write: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorCode::Io, "write failed: " + path.string());
}

ImageBuffer load_image(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  if (looks_like_png(bytes)) return decode_png(bytes);
  if (looks_like_jpeg(bytes)) return decode_jpeg_bytes(bytes);
  raise(ErrorCode::Format, "not a PNG or JPEG file: " + path.string());
}

SegMap load_segmap(const std::filesystem::path& path,
                   std::shared_ptr<const ClassTaxonomy> taxonomy) {
  auto bytes = read_file(path);
  if (!looks_like_png(bytes))
    raise(ErrorCode::Format, "segmap must be a PNG file: " + path.string());
  ImageBuffer img = decode_png(bytes);
  if (img.channels != 1)
    raise(ErrorCode::Format,
          "segmap must be single-channel, got " +
              std::to_string(img.channels) + " channels: " + path.string());
  return SegMap::from_labels(img.width, img.height, std::move(img.data),
                             std::move(taxonomy));
}

void save_png(const ImageBuffer& img, const std::filesystem::path& path) {
  img.validate();
  std::string error_message;
  PngWriter writer;
  writer.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error_message,
                                       png_on_error, png_on_warning);
  if (!writer.png) raise(ErrorCode::Internal, "png_create_write_struct failed");
  writer.info = png_create_info_struct(writer.png);
  if (!writer.info) raise(ErrorCode::Internal, "png_create_info_struct failed");

  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) raise(ErrorCode::Io, "cannot open for write: " + path.string());

  std::vector<png_bytep> rows(img.height);
  size_t stride = static_cast<size_t>(img.width) * img.channels;
  for (int y = 0; y < img.height; ++y)
    rows[y] = const_cast<png_bytep>(img.data.data() + y * stride);

  if (setjmp(png_jmpbuf(writer.png))) {
    std::fclose(fp);
    raise(ErrorCode::Io, "PNG encode failed: " + error_message);
  }

  png_init_io(writer.png, fp);
  png_set_IHDR(writer.png, writer.info, img.width, img.height, 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png, writer.info);
  png_write_image(writer.png, rows.data());
  png_write_end(writer.png, nullptr);
  std::fclose(fp);
}

}  // namespace semwire
