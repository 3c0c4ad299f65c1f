#include "samr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "imageio.hpp"

namespace semwire {

namespace {

using nlohmann::json;

std::vector<uint8_t> meta_to_bytes(const SamrMeta& meta) {
  json j;
  j["kind"] = "samr";
  j["orig_w"] = meta.orig_w;
  j["orig_h"] = meta.orig_h;
  j["config"] = meta.config_id;
  j["quality"] = meta.quality;
  j["seed"] = meta.seed;
  j["n_h"] = meta.n_h;
  j["n_w"] = meta.n_w;
  std::string text = j.dump();
  return {text.begin(), text.end()};
}

SamrMeta meta_from_bytes(std::span<const uint8_t> bytes) {
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(ErrorCode::Container, "MET entry is not valid JSON");
  if (j.value("kind", "") != "samr")
    raise(ErrorCode::Container, "MET entry does not describe a SAMR payload");
  SamrMeta meta;
  try {
    meta.orig_w = j.at("orig_w").get<int>();
    meta.orig_h = j.at("orig_h").get<int>();
    meta.config_id = j.at("config").get<int>();
    meta.quality = j.at("quality").get<int>();
    meta.seed = j.at("seed").get<uint64_t>();
    meta.n_h = j.at("n_h").get<int>();
    meta.n_w = j.at("n_w").get<int>();
  } catch (const json::exception& e) {
    raise(ErrorCode::Container, std::string("MET entry incomplete: ") + e.what());
  }
  return meta;
}

// Pixel-level mask expanded from the patch grid.
std::vector<uint8_t> pixel_mask(const PatchMask& mask, int width, int height) {
  std::vector<uint8_t> px(static_cast<size_t>(width) * height, 0);
  PatchGrid grid = PatchGrid::for_image(width, height);
  for (int i = 0; i < mask.n_h; ++i) {
    for (int j = 0; j < mask.n_w; ++j) {
      if (!mask.at(i, j)) continue;
      auto rect = grid.patch_rect(i, j);
      for (int y = rect.y0; y < rect.y1; ++y)
        std::fill_n(px.begin() + static_cast<size_t>(y) * width + rect.x0,
                    rect.x1 - rect.x0, uint8_t{1});
    }
  }
  return px;
}

struct SolveGrid {
  int w = 0, h = 0, channels = 0;
  std::vector<float> values;        // interleaved, like ImageBuffer
  std::vector<uint8_t> masked;      // per pixel
};

// One red-black Gauss-Seidel sweep; returns the largest absolute update.
// Border pixels average over their in-bounds neighbors only.
float gs_sweep(SolveGrid& g) {
  float max_update = 0.0f;
  const int w = g.w, h = g.h, ch = g.channels;
  for (int parity = 0; parity < 2; ++parity) {
    for (int y = 0; y < h; ++y) {
      for (int x = (y + parity) & 1; x < w; x += 2) {
        size_t p = static_cast<size_t>(y) * w + x;
        if (!g.masked[p]) continue;
        for (int c = 0; c < ch; ++c) {
          float sum = 0.0f;
          int count = 0;
          if (x > 0) { sum += g.values[(p - 1) * ch + c]; ++count; }
          if (x + 1 < w) { sum += g.values[(p + 1) * ch + c]; ++count; }
          if (y > 0) { sum += g.values[(p - w) * ch + c]; ++count; }
          if (y + 1 < h) { sum += g.values[(p + w) * ch + c]; ++count; }
          float next = sum / static_cast<float>(count);
          float delta = std::fabs(next - g.values[p * ch + c]);
          if (delta > max_update) max_update = delta;
          g.values[p * ch + c] = next;
        }
      }
    }
  }
  return max_update;
}

// Coarse-to-fine initial guess: restrict by averaging unmasked children,
// solve the half-resolution problem tightly, and seed fine masked pixels
// from the coarse solution. Large holes then reach the fine-level tol in
// a handful of sweeps instead of stalling on smooth error modes.
void init_from_coarse(SolveGrid& g, float tol) {
  if (g.w < 8 || g.h < 8) return;

  SolveGrid coarse;
  coarse.w = g.w / 2;
  coarse.h = g.h / 2;
  coarse.channels = g.channels;
  coarse.values.assign(static_cast<size_t>(coarse.w) * coarse.h * g.channels,
                       0.0f);
  coarse.masked.assign(static_cast<size_t>(coarse.w) * coarse.h, 0);

  for (int y = 0; y < coarse.h; ++y) {
    for (int x = 0; x < coarse.w; ++x) {
      size_t cp = static_cast<size_t>(y) * coarse.w + x;
      int unmasked = 0;
      for (int c = 0; c < g.channels; ++c) {
        float sum = 0.0f;
        int count = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            size_t fp = static_cast<size_t>(2 * y + dy) * g.w + (2 * x + dx);
            if (!g.masked[fp]) {
              sum += g.values[fp * g.channels + c];
              ++count;
            }
          }
        }
        if (c == 0) unmasked = count;
        coarse.values[cp * g.channels + c] = count ? sum / count : 0.0f;
      }
      coarse.masked[cp] = unmasked == 0 ? 1 : 0;
    }
  }

  init_from_coarse(coarse, tol);
  for (int iter = 0; iter < kInpaintMaxIter; ++iter) {
    if (gs_sweep(coarse) < tol) break;
  }

  // Prolongate: bilinear sample of the coarse grid at fine centers.
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      size_t fp = static_cast<size_t>(y) * g.w + x;
      if (!g.masked[fp]) continue;
      float cx = std::clamp((x - 0.5f) / 2.0f, 0.0f, coarse.w - 1.0f);
      float cy = std::clamp((y - 0.5f) / 2.0f, 0.0f, coarse.h - 1.0f);
      int x0 = static_cast<int>(cx), y0 = static_cast<int>(cy);
      int x1 = std::min(x0 + 1, coarse.w - 1);
      int y1 = std::min(y0 + 1, coarse.h - 1);
      float fx = cx - x0, fy = cy - y0;
      for (int c = 0; c < g.channels; ++c) {
        auto cv = [&](int xx, int yy) {
          return coarse
              .values[(static_cast<size_t>(yy) * coarse.w + xx) * g.channels +
                      c];
        };
        g.values[fp * g.channels + c] =
            (1 - fy) * ((1 - fx) * cv(x0, y0) + fx * cv(x1, y0)) +
            fy * ((1 - fx) * cv(x0, y1) + fx * cv(x1, y1));
      }
    }
  }
}

std::string replace_all(std::string s, std::string_view key,
                        const std::string& value) {
  size_t pos = 0;
  while ((pos = s.find(key, pos)) != std::string::npos) {
    s.replace(pos, key.size(), value);
    pos += value.size();
  }
  return s;
}

}  // namespace

PayloadContainer SamrBitstream::to_container() const {
  PayloadContainer container;
  container.entries.push_back(make_entry(kTagMeta, meta_to_bytes(meta)));
  container.entries.push_back(
      make_entry(kTagJpeg, jpeg.bytes));
  if (mask_rle)
    container.entries.push_back(make_entry(kTagMask, *mask_rle));
  return container;
}

SamrBitstream SamrBitstream::from_container(const PayloadContainer& container) {
  const ContainerEntry* met = container.find(kTagMeta);
  const ContainerEntry* jpg = container.find(kTagJpeg);
  if (!met || !jpg)
    raise(ErrorCode::Container, "SAMR container requires MET and JPG entries");

  SamrBitstream bs;
  bs.meta = meta_from_bytes(met->body);
  bs.jpeg.format = CodecFormat::Jpeg;
  bs.jpeg.quality = bs.meta.quality;
  bs.jpeg.bytes = jpg->body;
  bs.jpeg.src_w = bs.meta.orig_w;
  bs.jpeg.src_h = bs.meta.orig_h;
  if (const ContainerEntry* msk = container.find(kTagMask)) {
    // Validate against the recorded grid now so errors surface early.
    rle_to_mask(msk->body, bs.meta.n_h, bs.meta.n_w);
    bs.mask_rle = msk->body;
  }
  return bs;
}

SamrBitstream samr_encode(const ImageBuffer& img, const SegMap& seg,
                          const MaskConfig& config, int quality, uint64_t seed,
                          bool with_mask_side_channel) {
  img.validate();
  seg.validate();
  if (seg.width != img.width || seg.height != img.height)
    raise(ErrorCode::Dimension, "segmap dimensions must equal image dimensions");

  PatchGrid grid = PatchGrid::for_image(img.width, img.height);
  PatchMask mask = semantic_mask(seg, config, grid, seed);
  ImageBuffer masked = apply_mask(img, mask);

  SamrBitstream bs;
  bs.jpeg = encode(masked, CodecFormat::Jpeg, quality);
  bs.meta.orig_w = img.width;
  bs.meta.orig_h = img.height;
  bs.meta.config_id = config.id;
  bs.meta.quality = quality;
  bs.meta.seed = seed;
  bs.meta.n_h = grid.n_h;
  bs.meta.n_w = grid.n_w;
  if (with_mask_side_channel) bs.mask_rle = mask_to_rle(mask);
  bs.jpeg.src_channels = img.channels;
  return bs;
}

PatchMask detect_mask(const ImageBuffer& decoded, const PatchGrid& grid,
                      double tau) {
  decoded.validate();
  if (tau < 0 || tau > 255)
    raise(ErrorCode::InvalidArgument, "tau must lie in [0, 255]");
  PatchMask mask = PatchMask::empty(grid.n_h, grid.n_w);
  for (int i = 0; i < grid.n_h; ++i) {
    for (int j = 0; j < grid.n_w; ++j) {
      auto rect = grid.patch_rect(i, j);
      uint64_t sum = 0;
      uint64_t count = 0;
      for (int y = rect.y0; y < rect.y1; ++y) {
        for (int x = rect.x0; x < rect.x1; ++x) {
          for (int c = 0; c < decoded.channels; ++c)
            sum += decoded.at(x, y, c);
        }
      }
      count = static_cast<uint64_t>(rect.x1 - rect.x0) *
              (rect.y1 - rect.y0) * decoded.channels;
      if (static_cast<double>(sum) / static_cast<double>(count) <= tau)
        mask.set(i, j, true);
    }
  }
  return mask;
}

InpaintResult inpaint_harmonic(const ImageBuffer& decoded,
                               const PatchMask& mask, int max_iter,
                               double tol) {
  decoded.validate();
  PatchGrid grid = PatchGrid::for_image(decoded.width, decoded.height);
  if (grid.n_h != mask.n_h || grid.n_w != mask.n_w)
    raise(ErrorCode::Dimension, "mask grid does not match image dimensions");

  InpaintResult result;
  result.image = decoded;
  if (mask.count() == 0) {
    result.solution.assign(decoded.data.begin(), decoded.data.end());
    return result;
  }

  SolveGrid g;
  g.w = decoded.width;
  g.h = decoded.height;
  g.channels = decoded.channels;
  g.masked = pixel_mask(mask, g.w, g.h);
  g.values.assign(decoded.data.begin(), decoded.data.end());

  float threshold = static_cast<float>(tol);
  init_from_coarse(g, std::max(threshold * 0.25f, 0.002f));

  int iterations = 0;
  bool converged = false;
  while (iterations < max_iter) {
    ++iterations;
    if (gs_sweep(g) < threshold) {
      converged = true;
      break;
    }
  }

  const size_t n = g.masked.size();
  for (size_t p = 0; p < n; ++p) {
    if (!g.masked[p]) continue;
    for (int c = 0; c < g.channels; ++c) {
      float v = std::clamp(g.values[p * g.channels + c], 0.0f, 255.0f);
      result.image.data[p * g.channels + c] =
          static_cast<uint8_t>(std::lround(v));
    }
  }
  result.solution = std::move(g.values);
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

Reconstructor Reconstructor::parse(const std::string& spec) {
  if (spec == "harmonic") return harmonic();
  if (spec.rfind("ext:", 0) == 0 && spec.size() > 4)
    return external(spec.substr(4));
  raise(ErrorCode::InvalidArgument,
        "reconstructor must be 'harmonic' or 'ext:<command>'");
}

ImageBuffer samr_decode(const SamrBitstream& bs, const Reconstructor& rec,
                        const std::filesystem::path& workdir) {
  ImageBuffer decoded = decode(bs.jpeg);
  PatchGrid grid = PatchGrid::for_image(decoded.width, decoded.height);
  if (grid.n_h != bs.meta.n_h || grid.n_w != bs.meta.n_w)
    raise(ErrorCode::Container, "decoded grid does not match MET grid");

  PatchMask mask = bs.mask_rle
                       ? rle_to_mask(*bs.mask_rle, bs.meta.n_h, bs.meta.n_w)
                       : detect_mask(decoded, grid);

  if (rec.kind == Reconstructor::Kind::Harmonic)
    return inpaint_harmonic(decoded, mask).image;

  std::filesystem::path dir =
      workdir.empty() ? std::filesystem::temp_directory_path() / "semwire_rec"
                      : workdir;
  std::filesystem::create_directories(dir);
  std::filesystem::path in_path = dir / "masked.png";
  std::filesystem::path mask_path = dir / "mask.png";
  std::filesystem::path out_path = dir / "reconstructed.png";
  save_png(decoded, in_path);

  ImageBuffer mask_img = ImageBuffer::create(decoded.width, decoded.height, 1);
  std::vector<uint8_t> px = pixel_mask(mask, decoded.width, decoded.height);
  for (size_t i = 0; i < px.size(); ++i) mask_img.data[i] = px[i] ? 255 : 0;
  save_png(mask_img, mask_path);

  std::string cmd = rec.command;
  cmd = replace_all(cmd, "{in}", in_path.string());
  cmd = replace_all(cmd, "{mask}", mask_path.string());
  cmd = replace_all(cmd, "{out}", out_path.string());
  int status = std::system(cmd.c_str());
  if (status != 0)
    raise(ErrorCode::External, "external reconstructor failed with status " +
                                   std::to_string(status) + ": " + cmd);
  ImageBuffer out = load_image(out_path);
  if (out.width != decoded.width || out.height != decoded.height)
    raise(ErrorCode::External, "external reconstructor output has wrong size");
  return out;
}

double masked_l1(const ImageBuffer& pred, const ImageBuffer& target,
                 const PatchMask& mask, double w_masked, double w_unmasked) {
  if (!pred.same_shape(target))
    raise(ErrorCode::Dimension, "masked_l1 requires identical shapes");
  if (w_masked < 0 || w_unmasked < 0)
    raise(ErrorCode::InvalidArgument, "weights must be nonnegative");
  PatchGrid grid = PatchGrid::for_image(pred.width, pred.height);
  if (grid.n_h != mask.n_h || grid.n_w != mask.n_w)
    raise(ErrorCode::Dimension, "mask grid does not match image dimensions");

  std::vector<uint8_t> px = pixel_mask(mask, pred.width, pred.height);
  double sum_masked = 0.0, sum_unmasked = 0.0;
  size_t n_masked = 0, n_unmasked = 0;
  const size_t n = px.size();
  for (size_t p = 0; p < n; ++p) {
    for (int c = 0; c < pred.channels; ++c) {
      double d = std::fabs(static_cast<double>(pred.data[p * pred.channels + c]) -
                           target.data[p * pred.channels + c]);
      if (px[p]) {
        sum_masked += d;
        ++n_masked;
      } else {
        sum_unmasked += d;
        ++n_unmasked;
      }
    }
  }
  double result = 0.0;
  if (n_masked) result += w_masked * (sum_masked / n_masked);
  if (n_unmasked) result += w_unmasked * (sum_unmasked / n_unmasked);
  return result;
}

}  // namespace semwire
