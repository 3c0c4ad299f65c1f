#pragma once

#include <filesystem>
#include <memory>
#include <span>

#include "image.hpp"
#include "segmap.hpp"

namespace semwire {

// Decodes a PNG or JPEG file (format sniffed from the signature).
// Grayscale sources yield channels = 1, everything else channels = 3.
ImageBuffer load_image(const std::filesystem::path& path);

// Reads a single-channel 8-bit PNG whose pixel values are class ids and
// validates every label against the taxonomy.
SegMap load_segmap(const std::filesystem::path& path,
                   std::shared_ptr<const ClassTaxonomy> taxonomy);

void save_png(const ImageBuffer& img, const std::filesystem::path& path);

// Raw byte helpers shared with the codec adapters.
std::vector<uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const uint8_t> bytes);

}  // namespace semwire
