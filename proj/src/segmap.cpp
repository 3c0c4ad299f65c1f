#include "segmap.hpp"

#include "error.hpp"

namespace semwire {

SegMap SegMap::create(int width, int height,
                      std::shared_ptr<const ClassTaxonomy> taxonomy,
                      uint8_t fill) {
  std::vector<uint8_t> labels(static_cast<size_t>(width) * height, fill);
  return from_labels(width, height, std::move(labels), std::move(taxonomy));
}

SegMap SegMap::from_labels(int width, int height, std::vector<uint8_t> labels,
                           std::shared_ptr<const ClassTaxonomy> taxonomy) {
  SegMap seg;
  seg.width = width;
  seg.height = height;
  seg.labels = std::move(labels);
  seg.taxonomy = std::move(taxonomy);
  seg.validate();
  return seg;
}

void SegMap::validate() const {
  if (width <= 0 || height <= 0)
    raise(ErrorCode::Dimension, "segmap dimensions must be positive");
  if (!taxonomy) raise(ErrorCode::InvalidArgument, "segmap has no taxonomy");
  if (labels.size() != static_cast<size_t>(width) * height)
    raise(ErrorCode::Dimension, "segmap label count does not match dimensions");
  const int num_classes = taxonomy->num_classes();
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes)
      raise(ErrorCode::Label,
            "label " + std::to_string(labels[i]) + " at pixel " +
                std::to_string(i) + " is outside [0, " +
                std::to_string(num_classes) + ")");
  }
}

}  // namespace semwire
