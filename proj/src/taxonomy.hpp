#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semwire {

// The eight coarse importance groups that masking probabilities attach to.
enum class SemanticGroup : uint8_t {
  Vehicles = 0,
  Humans,
  FlatSurfaces,
  Construction,
  Objects,
  Nature,
  Sky,
  Background,
};

inline constexpr int kNumGroups = 8;

const char* group_name(SemanticGroup group);
std::optional<SemanticGroup> group_from_name(std::string_view name);

// Maps dataset class ids onto names and semantic groups. group_of is total:
// every id in [0, num_classes) has a group.
struct ClassTaxonomy {
  std::vector<std::string> names;
  std::vector<SemanticGroup> group_of;

  int num_classes() const { return static_cast<int>(group_of.size()); }

  SemanticGroup group(int class_id) const { return group_of[class_id]; }

  // Text format, one class per line: "<id> <name> <group>". Names may
  // contain spaces; the last token is the group. '#' starts a comment.
  // Ids must form a dense range starting at 0.
  static ClassTaxonomy parse(std::string_view text);
  static ClassTaxonomy load(const std::filesystem::path& path);

  // Built-in default: the 34 Cityscapes labelIds folded onto the eight
  // groups (void categories map to Background). The same table ships as
  // an editable file under data/.
  static std::shared_ptr<const ClassTaxonomy> cityscapes34();
};

}  // namespace semwire
