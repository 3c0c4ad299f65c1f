#include "container.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "error.hpp"

namespace semwire {

namespace {

bool tag_bytes_valid(std::string_view tag) {
  if (tag.size() != 3) return false;
  for (char c : tag) {
    if (c < 0x21 || c > 0x7E) return false;  // printable ASCII, no spaces
  }
  return true;
}

}  // namespace

bool tag_recognized(std::string_view tag) {
  return tag == kTagSeg || tag == kTagEdge || tag == kTagCaption ||
         tag == kTagJpeg || tag == kTagMask || tag == kTagMeta;
}

ContainerEntry make_entry(std::string_view tag, std::vector<uint8_t> body) {
  if (!tag_bytes_valid(tag))
    raise(ErrorCode::Container, "tag must be 3 printable ASCII bytes");
  ContainerEntry entry;
  std::memcpy(entry.tag.data(), tag.data(), 3);
  entry.body = std::move(body);
  return entry;
}

ContainerEntry make_entry(std::string_view tag, std::string_view body) {
  return make_entry(tag,
                    std::vector<uint8_t>(body.begin(), body.end()));
}

const ContainerEntry* PayloadContainer::find(std::string_view tag) const {
  for (const auto& entry : entries) {
    if (entry.tag_view() == tag) return &entry;
  }
  return nullptr;
}

bool PayloadContainer::has_unrecognized() const {
  for (const auto& entry : entries) {
    if (!entry.recognized()) return true;
  }
  return false;
}

size_t PayloadContainer::total_bytes() const {
  size_t total = kContainerMagic.size();
  for (const auto& entry : entries) total += 3 + 4 + entry.body.size();
  return total;
}

std::vector<uint8_t> PayloadContainer::serialize() const {
  std::vector<uint8_t> out;
  out.reserve(total_bytes());
  out.insert(out.end(), kContainerMagic.begin(), kContainerMagic.end());
  for (const auto& entry : entries) {
    if (!tag_bytes_valid(entry.tag_view()))
      raise(ErrorCode::Container, "entry tag is not 3 printable ASCII bytes");
    if (entry.body.empty())
      raise(ErrorCode::Container,
            "entry '" + std::string(entry.tag_view()) + "' has empty body");
    if (entry.body.size() > std::numeric_limits<uint32_t>::max())
      raise(ErrorCode::Container, "entry body exceeds u32 length field");
    out.insert(out.end(), entry.tag.begin(), entry.tag.end());
    uint32_t len = static_cast<uint32_t>(entry.body.size());
    for (int shift = 0; shift < 32; shift += 8)
      out.push_back(static_cast<uint8_t>((len >> shift) & 0xFF));
    out.insert(out.end(), entry.body.begin(), entry.body.end());
  }
  return out;
}

PayloadContainer PayloadContainer::parse(std::span<const uint8_t> bytes) {
  if (bytes.size() < kContainerMagic.size())
    raise(ErrorCode::Container, "container shorter than magic");
  if (std::memcmp(bytes.data(), kContainerMagic.data(),
                  kContainerMagic.size()) != 0)
    raise(ErrorCode::Container, "bad container magic");

  PayloadContainer container;
  size_t pos = kContainerMagic.size();
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 7)
      raise(ErrorCode::Container, "truncated entry header at offset " +
                                      std::to_string(pos));
    ContainerEntry entry;
    std::memcpy(entry.tag.data(), bytes.data() + pos, 3);
    if (!tag_bytes_valid(entry.tag_view()))
      raise(ErrorCode::Container,
            "invalid entry tag at offset " + std::to_string(pos));
    pos += 3;
    uint32_t len = 0;
    for (int shift = 0; shift < 32; shift += 8)
      len |= static_cast<uint32_t>(bytes[pos++]) << shift;
    if (len == 0)
      raise(ErrorCode::Container, "entry with zero-length body");
    if (bytes.size() - pos < len)
      raise(ErrorCode::Container, "truncated entry body: declared " +
                                      std::to_string(len) + " bytes, " +
                                      std::to_string(bytes.size() - pos) +
                                      " remain");
    entry.body.assign(bytes.begin() + pos, bytes.begin() + pos + len);
    pos += len;
    container.entries.push_back(std::move(entry));
  }
  return container;
}

void PayloadContainer::save(const std::filesystem::path& path) const {
  auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open for write: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorCode::Io, "write failed: " + path.string());
}

PayloadContainer PayloadContainer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open container: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return parse(bytes);
}

}  // namespace semwire
