#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semwire {

// SMC1 payload container: 4-byte magic "SMC1" followed by entries of
// (3 ASCII-byte tag, u32 little-endian length, body). Every transmitted
// byte lives here, so serialized size is the ground truth for all
// compression accounting.
inline constexpr std::string_view kContainerMagic = "SMC1";

inline constexpr std::string_view kTagSeg = "SEG";  // WebP segmentation map
inline constexpr std::string_view kTagEdge = "EDG"; // WebP edge map
inline constexpr std::string_view kTagCaption = "CAP"; // UTF-8 caption
inline constexpr std::string_view kTagJpeg = "JPG"; // JPEG bitstream
inline constexpr std::string_view kTagMask = "MSK"; // run-length patch mask
inline constexpr std::string_view kTagMeta = "MET"; // UTF-8 JSON metadata

bool tag_recognized(std::string_view tag);

struct ContainerEntry {
  std::array<char, 3> tag{};
  std::vector<uint8_t> body;

  std::string_view tag_view() const { return {tag.data(), tag.size()}; }
  bool recognized() const { return tag_recognized(tag_view()); }
};

ContainerEntry make_entry(std::string_view tag, std::vector<uint8_t> body);
ContainerEntry make_entry(std::string_view tag, std::string_view body);

struct PayloadContainer {
  std::vector<ContainerEntry> entries;

  const ContainerEntry* find(std::string_view tag) const;
  bool has_unrecognized() const;

  // Serialized size in bytes: 4 + sum over entries of (7 + body length).
  size_t total_bytes() const;

  std::vector<uint8_t> serialize() const;
  static PayloadContainer parse(std::span<const uint8_t> bytes);

  void save(const std::filesystem::path& path) const;
  static PayloadContainer load(const std::filesystem::path& path);
};

}  // namespace semwire
