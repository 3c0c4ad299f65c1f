#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "taxonomy.hpp"

namespace semwire {

// Per-pixel class labels at the resolution of the image they annotate.
// Labels are validated against the taxonomy on construction; out-of-range
// values are rejected, never clamped.
struct SegMap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> labels;
  std::shared_ptr<const ClassTaxonomy> taxonomy;

  static SegMap create(int width, int height,
                       std::shared_ptr<const ClassTaxonomy> taxonomy,
                       uint8_t fill = 0);
  static SegMap from_labels(int width, int height, std::vector<uint8_t> labels,
                            std::shared_ptr<const ClassTaxonomy> taxonomy);

  uint8_t label_at(int x, int y) const {
    return labels[static_cast<size_t>(y) * width + x];
  }

  SemanticGroup group_at(int x, int y) const {
    return taxonomy->group(label_at(x, y));
  }

  void validate() const;
};

}  // namespace semwire
