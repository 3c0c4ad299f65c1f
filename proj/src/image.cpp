#include "image.hpp"

namespace semwire {

ImageBuffer ImageBuffer::create(int width, int height, int channels,
                                uint8_t fill) {
  if (width <= 0 || height <= 0)
    raise(ErrorCode::Dimension, "image dimensions must be positive");
  if (channels != 1 && channels != 3)
    raise(ErrorCode::InvalidArgument, "channels must be 1 or 3");
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.assign(static_cast<size_t>(width) * height * channels, fill);
  return img;
}

void ImageBuffer::validate() const {
  if (width <= 0 || height <= 0)
    raise(ErrorCode::Dimension, "image dimensions must be positive");
  if (channels != 1 && channels != 3)
    raise(ErrorCode::InvalidArgument, "channels must be 1 or 3");
  if (data.size() != static_cast<size_t>(width) * height * channels)
    raise(ErrorCode::Dimension, "image data length does not match dimensions");
}

}  // namespace semwire
