#include "masking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace semwire {

namespace {

// RNG stream ids; keep the two masking modes decorrelated under one seed.
constexpr uint64_t kStreamSemantic = 0;
constexpr uint64_t kStreamRandom = 1;

// Group columns: Vehicles, Humans, FlatSurfaces, Construction, Objects,
// Nature, Sky, Background. Rows 0/2/4/7 are the published table; 1/3/5/6
// interpolate between their neighbors and stay monotone per column.
constexpr double kPresets[kNumConfigPresets][kNumGroups] = {
    {0.00, 0.20, 0.20, 0.50, 0.50, 0.80, 0.80, 0.80},  // 0 conservative
    {0.10, 0.30, 0.30, 0.55, 0.55, 0.80, 0.80, 0.80},  // 1
    {0.20, 0.40, 0.40, 0.60, 0.60, 0.80, 0.80, 0.80},  // 2 moderate
    {0.30, 0.45, 0.45, 0.65, 0.65, 0.80, 0.80, 0.80},  // 3
    {0.40, 0.50, 0.50, 0.70, 0.70, 0.80, 0.80, 0.80},  // 4 balanced
    {0.40, 0.55, 0.55, 0.75, 0.75, 0.85, 0.85, 0.85},  // 5
    {0.40, 0.55, 0.55, 0.75, 0.75, 0.90, 0.90, 0.90},  // 6
    {0.40, 0.60, 0.60, 0.80, 0.80, 0.90, 0.90, 0.90},  // 7 aggressive
};

void append_leb128(std::vector<uint8_t>& out, uint64_t value) {
  while (value >= 0x80) {
    out.push_back(static_cast<uint8_t>(value) | 0x80);
    value >>= 7;
  }
  out.push_back(static_cast<uint8_t>(value));
}

}  // namespace

PatchGrid PatchGrid::for_image(int width, int height) {
  if (width < kPatch || height < kPatch)
    raise(ErrorCode::Dimension,
          "masking requires images of at least 8x8 pixels");
  PatchGrid grid;
  grid.image_w = width;
  grid.image_h = height;
  grid.n_w = (width + kPatch - 1) / kPatch;
  grid.n_h = (height + kPatch - 1) / kPatch;
  return grid;
}

PatchGrid::Rect PatchGrid::patch_rect(int i, int j) const {
  Rect r;
  r.x0 = j * kPatch;
  r.y0 = i * kPatch;
  r.x1 = std::min(r.x0 + kPatch, image_w);
  r.y1 = std::min(r.y0 + kPatch, image_h);
  return r;
}

MaskConfig MaskConfig::preset(int id) {
  if (id < 0 || id >= kNumConfigPresets)
    raise(ErrorCode::InvalidArgument,
          "config id must be in [0, " + std::to_string(kNumConfigPresets) +
              "), got " + std::to_string(id));
  MaskConfig config;
  config.id = id;
  for (int g = 0; g < kNumGroups; ++g) config.rho[g] = kPresets[id][g];
  return config;
}

MaskConfig MaskConfig::parse(std::string_view text, int id) {
  MaskConfig config;
  config.id = id;
  std::array<bool, kNumGroups> seen{};
  std::istringstream stream{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    double value;
    if (!(fields >> name)) continue;
    // Allow "group: 0.5" as well as "group 0.5".
    if (!name.empty() && name.back() == ':') name.pop_back();
    if (!(fields >> value))
      raise(ErrorCode::Format, "config line " + std::to_string(line_no) +
                                   ": expected '<group> <probability>'");
    auto group = group_from_name(name);
    if (!group)
      raise(ErrorCode::Format, "config line " + std::to_string(line_no) +
                                   ": unknown group '" + name + "'");
    config.rho[static_cast<int>(*group)] = value;
    seen[static_cast<int>(*group)] = true;
  }
  for (int g = 0; g < kNumGroups; ++g) {
    if (!seen[g])
      raise(ErrorCode::Format,
            std::string("config missing group '") +
                group_name(static_cast<SemanticGroup>(g)) + "'");
  }
  config.validate();
  return config;
}

MaskConfig MaskConfig::load(const std::filesystem::path& path, int id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), id);
}

void MaskConfig::validate() const {
  for (int g = 0; g < kNumGroups; ++g) {
    if (!(rho[g] >= 0.0 && rho[g] <= 1.0))
      raise(ErrorCode::InvalidArgument,
            std::string("probability for group '") +
                group_name(static_cast<SemanticGroup>(g)) +
                "' must lie in [0, 1]");
  }
}

size_t PatchMask::count() const {
  return static_cast<size_t>(
      std::count_if(bits.begin(), bits.end(), [](uint8_t b) { return b != 0; }));
}

PatchMask PatchMask::empty(int n_h, int n_w, uint64_t seed) {
  PatchMask mask;
  mask.n_h = n_h;
  mask.n_w = n_w;
  mask.seed = seed;
  mask.bits.assign(static_cast<size_t>(n_h) * n_w, 0);
  return mask;
}

int dominant_class(const SegMap& seg, const PatchGrid& grid, int i, int j) {
  if (i < 0 || i >= grid.n_h || j < 0 || j >= grid.n_w)
    raise(ErrorCode::InvalidArgument, "patch index outside grid");
  auto rect = grid.patch_rect(i, j);
  std::array<int, 256> counts{};
  for (int y = rect.y0; y < rect.y1; ++y) {
    for (int x = rect.x0; x < rect.x1; ++x) ++counts[seg.label_at(x, y)];
  }
  int best = 0;
  for (int c = 1; c < seg.taxonomy->num_classes(); ++c) {
    if (counts[c] > counts[best]) best = c;  // ties keep the smaller id
  }
  return best;
}

PatchMask semantic_mask(const SegMap& seg, const MaskConfig& config,
                        const PatchGrid& grid, uint64_t seed) {
  if (seg.width < grid.image_w || seg.height < grid.image_h)
    raise(ErrorCode::Dimension, "segmap does not cover the patch grid");
  config.validate();
  CounterRng rng(seed);
  PatchMask mask = PatchMask::empty(grid.n_h, grid.n_w, seed);
  for (int i = 0; i < grid.n_h; ++i) {
    for (int j = 0; j < grid.n_w; ++j) {
      int cls = dominant_class(seg, grid, i, j);
      double rho = config.rho_for(seg.taxonomy->group(cls));
      uint64_t patch_index = static_cast<uint64_t>(i) * grid.n_w + j;
      mask.set(i, j, rng.uniform01(kStreamSemantic, patch_index) < rho);
    }
  }
  return mask;
}

PatchMask random_mask(const PatchGrid& grid, double rho, uint64_t seed) {
  if (!(rho >= 0.0 && rho <= 1.0))
    raise(ErrorCode::InvalidArgument, "rho must lie in [0, 1]");
  const int n = grid.patch_count();
  const int target = static_cast<int>(std::floor(rho * n));

  // Seeded Fisher-Yates; the first `target` slots are the selection.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed);
  for (int i = 0; i < std::min(target, n - 1); ++i) {
    uint64_t pick = rng.bounded(kStreamRandom, static_cast<uint64_t>(i),
                                static_cast<uint64_t>(n - i));
    std::swap(order[i], order[i + static_cast<int>(pick)]);
  }

  PatchMask mask = PatchMask::empty(grid.n_h, grid.n_w, seed);
  for (int k = 0; k < target; ++k) mask.bits[order[k]] = 1;
  return mask;
}

ImageBuffer apply_mask(const ImageBuffer& img, const PatchMask& mask) {
  img.validate();
  PatchGrid grid = PatchGrid::for_image(img.width, img.height);
  if (grid.n_h != mask.n_h || grid.n_w != mask.n_w)
    raise(ErrorCode::Dimension, "mask grid does not match image dimensions");
  ImageBuffer out = img;
  for (int i = 0; i < mask.n_h; ++i) {
    for (int j = 0; j < mask.n_w; ++j) {
      if (!mask.at(i, j)) continue;
      auto rect = grid.patch_rect(i, j);
      for (int y = rect.y0; y < rect.y1; ++y) {
        uint8_t* row = out.data.data() + out.index(rect.x0, y, 0);
        std::fill(row, row + static_cast<size_t>(rect.x1 - rect.x0) *
                                 out.channels,
                  uint8_t{0});
      }
    }
  }
  return out;
}

std::vector<uint8_t> mask_to_rle(const PatchMask& mask) {
  if (mask.bits.empty()) raise(ErrorCode::Rle, "cannot encode an empty mask");
  std::vector<uint8_t> out;
  out.push_back(mask.bits.front() ? 1 : 0);
  uint64_t run = 0;
  uint8_t current = mask.bits.front() ? 1 : 0;
  for (uint8_t bit : mask.bits) {
    uint8_t b = bit ? 1 : 0;
    if (b == current) {
      ++run;
    } else {
      append_leb128(out, run);
      current = b;
      run = 1;
    }
  }
  append_leb128(out, run);
  return out;
}

PatchMask rle_to_mask(std::span<const uint8_t> bytes, int n_h, int n_w) {
  if (n_h <= 0 || n_w <= 0)
    raise(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  if (bytes.empty()) raise(ErrorCode::Rle, "empty run-length data");
  if (bytes.front() > 1)
    raise(ErrorCode::Rle, "first byte must be the starting bit (0 or 1)");

  const size_t total = static_cast<size_t>(n_h) * n_w;
  PatchMask mask = PatchMask::empty(n_h, n_w);
  uint8_t value = bytes.front();
  size_t pos = 1;
  size_t filled = 0;
  while (pos < bytes.size()) {
    uint64_t run = 0;
    int shift = 0;
    while (true) {
      if (pos >= bytes.size()) raise(ErrorCode::Rle, "truncated run length");
      uint8_t byte = bytes[pos++];
      run |= static_cast<uint64_t>(byte & 0x7F) << shift;
      shift += 7;
      if (!(byte & 0x80)) break;
      if (shift > 63) raise(ErrorCode::Rle, "run length overflows");
    }
    if (run == 0) raise(ErrorCode::Rle, "zero-length run");
    if (filled + run > total)
      raise(ErrorCode::Rle, "runs exceed grid size " + std::to_string(total));
    if (value) std::fill_n(mask.bits.begin() + filled, run, uint8_t{1});
    filled += run;
    value ^= 1;
  }
  if (filled != total)
    raise(ErrorCode::Rle, "runs cover " + std::to_string(filled) +
                              " bits, grid has " + std::to_string(total));
  return mask;
}

}  // namespace semwire
