#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "caption.hpp"
#include "image.hpp"
#include "segmap.hpp"

namespace semwire {

// Deterministic street-scene generator. Scenes carry the texture mix the
// pipelines care about (smooth sky, window grids, foliage, road markings,
// vehicles) together with a pixel-exact label map on the bundled
// Cityscapes taxonomy, so corpus-level tests do not depend on dataset
// downloads.
struct SynthScene {
  ImageBuffer image;
  SegMap segmap;
  Caption caption;
};

SynthScene synth_scene(int width, int height, uint64_t seed);

struct SynthCorpusOptions {
  int count = 5;
  int width = 2048;
  int height = 1024;
  uint64_t seed = 1;
};

// Writes scene_###.png / scene_###.labels.png / scene_###.caption.txt
// triples into dir; returns the image paths.
std::vector<std::filesystem::path> synth_corpus(
    const std::filesystem::path& dir, const SynthCorpusOptions& opts = {});

}  // namespace semwire
