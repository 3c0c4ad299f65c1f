// Acceptance suite: runs every criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is nonzero when any
// criterion fails. Criterion 4 needs a real Cityscapes sample; point
// SEMWIRE_CITYSCAPES_DIR at a corpus directory to enable it, otherwise it
// reports "skipped (dataset absent)".

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "canny.hpp"
#include "codec.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "imageio.hpp"
#include "masking.hpp"
#include "metrics.hpp"
#include "mmsd.hpp"
#include "samr.hpp"
#include "sweep.hpp"
#include "synth.hpp"

using namespace semwire;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  bool passed = true;
  bool skipped = false;
  std::string detail;
  double seconds = 0;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

struct Corpus {
  fs::path dir;
  std::vector<CorpusItem> items;
  std::vector<ImageBuffer> images;
  std::vector<SegMap> segmaps;
  std::vector<Caption> captions;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out.precision(precision);
  out << std::fixed << v;
  return out.str();
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

Corpus build_corpus() {
  Corpus corpus;
  corpus.dir = fs::temp_directory_path() / "semwire_acceptance_corpus";
  fs::remove_all(corpus.dir);
  SynthCorpusOptions opts;
  opts.count = 5;
  opts.width = 2048;
  opts.height = 1024;
  opts.seed = 424242;
  synth_corpus(corpus.dir, opts);
  corpus.items = scan_corpus(corpus.dir);
  for (const auto& item : corpus.items) {
    corpus.images.push_back(load_image(item.image));
    corpus.segmaps.push_back(
        load_segmap(item.labels, ClassTaxonomy::cityscapes34()));
    auto bytes = read_file(item.caption);
    corpus.captions.push_back(
        Caption{std::string(bytes.begin(), bytes.end())});
  }
  return corpus;
}

// ---- criterion bodies ----

void criterion_masking_statistics(Criterion& c) {
  // striped segmap over an 8-class taxonomy: 320x256 grid = 81920
  // patches, 10240 per group
  auto tax = semwire::testing::group_taxonomy();
  const int grid_rows = 320, grid_cols = 256, rows_per_group = 40;
  const int w = grid_cols * 8, h = grid_rows * 8;
  std::vector<uint8_t> labels(size_t(w) * h);
  for (int y = 0; y < h; ++y) {
    uint8_t cls = uint8_t((y / (8 * rows_per_group)) % kNumGroups);
    std::fill_n(labels.begin() + size_t(y) * w, w, cls);
  }
  SegMap seg = SegMap::from_labels(w, h, std::move(labels), tax);
  PatchGrid grid = PatchGrid::for_image(w, h);
  MaskConfig config = MaskConfig::preset(0);
  PatchMask mask = semantic_mask(seg, config, grid, 20260809);

  std::array<size_t, kNumGroups> masked{}, total{};
  for (int i = 0; i < grid.n_h; ++i) {
    int group = (i / rows_per_group) % kNumGroups;
    for (int j = 0; j < grid.n_w; ++j) {
      ++total[group];
      if (mask.at(i, j)) ++masked[group];
    }
  }
  for (int g = 0; g < kNumGroups; ++g) {
    double rho = config.rho[g];
    double n = double(total[g]);
    c.require(n >= 1e4, std::string(group_name(SemanticGroup(g))) +
                            " has fewer than 1e4 patches");
    double rate = double(masked[g]) / n;
    if (g == int(SemanticGroup::Vehicles)) {
      c.require(masked[g] == 0, "vehicles rate not exactly 0");
      continue;
    }
    double sigma = std::sqrt(rho * (1.0 - rho) / n);
    c.require(std::fabs(rate - rho) <= 3.0 * sigma,
              std::string(group_name(SemanticGroup(g))) + " rate " +
                  fmt(rate) + " outside 3-sigma of " + fmt(rho));
  }
}

void criterion_compression_gain(Criterion& c, const Corpus& corpus) {
  for (size_t i = 0; i < corpus.images.size(); ++i) {
    for (int config_id : {0, 2, 4, 7}) {
      MaskConfig config = MaskConfig::preset(config_id);
      for (int q : {5, 10, 50}) {
        SamrBitstream bs = samr_encode(corpus.images[i], corpus.segmaps[i],
                                       config, q, 99, false);
        EncodedBlob plain = encode(corpus.images[i], CodecFormat::Jpeg, q);
        c.require(bs.jpeg.bytes.size() <= plain.bytes.size(),
                  corpus.items[i].stem + " config " +
                      std::to_string(config_id) + " Q" + std::to_string(q) +
                      ": masked " + std::to_string(bs.jpeg.bytes.size()) +
                      " > unmasked " + std::to_string(plain.bytes.size()));
      }
    }
  }
}

void criterion_bitrate_ordering(Criterion& c, const Corpus& corpus) {
  std::vector<double> bpp0, bpp7;
  for (size_t i = 0; i < corpus.images.size(); ++i) {
    const ImageBuffer& img = corpus.images[i];
    SamrBitstream c0 = samr_encode(img, corpus.segmaps[i],
                                   MaskConfig::preset(0), 5, 7, false);
    SamrBitstream c7 = samr_encode(img, corpus.segmaps[i],
                                   MaskConfig::preset(7), 5, 7, false);
    bpp0.push_back(
        bpp(c0.to_container().total_bytes(), img.width, img.height));
    bpp7.push_back(
        bpp(c7.to_container().total_bytes(), img.width, img.height));
  }
  double mean0 = mean(bpp0), mean7 = mean(bpp7);
  c.note("config0 " + fmt(mean0) + " BPP, config7 " + fmt(mean7) + " BPP");
  c.require(mean0 > mean7, "config 0 mean BPP not above config 7");
  c.require(mean0 >= 0.05 && mean0 <= 0.13,
            "config 0 mean BPP outside [0.05, 0.13]");
  c.require(mean7 >= 0.03 && mean7 <= 0.10,
            "config 7 mean BPP outside [0.03, 0.10]");
}

void criterion_jpeg_anchor(Criterion& c) {
  const char* dir = std::getenv("SEMWIRE_CITYSCAPES_DIR");
  if (!dir || !*dir) {
    c.skipped = true;
    c.detail = "skipped (dataset absent)";
    return;
  }
  auto items = scan_corpus(dir);
  if (items.size() < 5) {
    c.require(false, "SEMWIRE_CITYSCAPES_DIR has fewer than 5 images");
    return;
  }
  std::vector<double> psnrs, msssims;
  for (const auto& item : items) {
    ImageBuffer img = load_image(item.image);
    ImageBuffer dec = decode(encode(img, CodecFormat::Jpeg, 5));
    psnrs.push_back(psnr(img, dec));
    msssims.push_back(ms_ssim(img, dec));
  }
  double mean_psnr = mean(psnrs), mean_ms = mean(msssims);
  c.note("Q5 mean PSNR " + fmt(mean_psnr, 2) + " dB, MS-SSIM " +
         fmt(mean_ms, 3));
  c.require(std::fabs(mean_psnr - 27.62) <= 2.5,
            "mean PSNR outside 27.62 +/- 2.5 dB");
  c.require(std::fabs(mean_ms - 0.864) <= 0.05,
            "mean MS-SSIM outside 0.864 +/- 0.05");
}

void criterion_mmsd_payload(Criterion& c, const Corpus& corpus) {
  std::vector<double> seg_kb, edge_kb, ratios, orig_mb;
  for (size_t i = 0; i < corpus.images.size(); ++i) {
    PayloadContainer payload = mmsd_pack(corpus.images[i], corpus.segmaps[i],
                                         corpus.captions[i]);
    const ContainerEntry* seg_entry = payload.find(kTagSeg);
    const ContainerEntry* edge_entry = payload.find(kTagEdge);
    const ContainerEntry* cap_entry = payload.find(kTagCaption);
    c.require(seg_entry && edge_entry && cap_entry, "missing entries");
    if (!seg_entry || !edge_entry || !cap_entry) return;

    seg_kb.push_back(double(seg_entry->body.size()) / 1024.0);
    edge_kb.push_back(double(edge_entry->body.size()) / 1024.0);
    c.require(cap_entry->body.size() == corpus.captions[i].byte_len(),
              "caption entry bytes differ from the caption size");

    double ratio = compression_ratio(corpus.items[i].image, payload);
    ratios.push_back(ratio);
    orig_mb.push_back(double(fs::file_size(corpus.items[i].image)) /
                      (1024.0 * 1024.0));
  }
  double mean_seg = mean(seg_kb), mean_edge = mean(edge_kb);
  double mean_ratio = mean(ratios), mean_orig = mean(orig_mb);
  c.note("seg " + fmt(mean_seg, 2) + " KB, edge " + fmt(mean_edge, 2) +
         " KB, ratio " + fmt(mean_ratio, 1) + "x, originals " +
         fmt(mean_orig, 2) + " MB");
  c.require(mean_seg >= 2.0 && mean_seg <= 8.0,
            "seg entry mean outside [2, 8] KB");
  c.require(mean_edge >= 8.0 && mean_edge <= 35.0,
            "edge entry mean outside [8, 35] KB");
  c.require(mean_orig >= 2.0, "originals below 2 MB");
  c.require(mean_ratio >= 80.0, "mean compression ratio below 80x");
}

void criterion_inpaint_oracle(Criterion& c) {
  // one masked 8x8 patch; boundary forced dark on the left, bright on
  // the right of the hole
  ImageBuffer img = ImageBuffer::create(40, 40, 1, 128);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      img.at(x, y, 0) = uint8_t(x < 20 ? 0 : 255);
  PatchGrid grid = PatchGrid::for_image(40, 40);
  PatchMask mask = PatchMask::empty(grid.n_h, grid.n_w);
  mask.set(2, 2, true);  // pixels [16,24) x [16,24) straddle the step
  ImageBuffer masked = apply_mask(img, mask);

  // dense solve: 64 unknowns, value = mean(4-neighbors)
  std::vector<size_t> unknowns;
  for (int y = 16; y < 24; ++y)
    for (int x = 16; x < 24; ++x) unknowns.push_back(size_t(y) * 40 + x);
  std::map<size_t, int> index;
  for (size_t k = 0; k < unknowns.size(); ++k) index[unknowns[k]] = int(k);
  const int n = int(unknowns.size());
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (int k = 0; k < n; ++k) {
    size_t p = unknowns[k];
    int x = int(p % 40), y = int(p / 40);
    const int off[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    int neighbors = 0;
    for (auto& o : off) {
      int nx = x + o[0], ny = y + o[1];
      if (nx < 0 || nx >= 40 || ny < 0 || ny >= 40) continue;
      ++neighbors;
      size_t q = size_t(ny) * 40 + nx;
      if (index.count(q))
        m[k][index[q]] -= 1.0;
      else
        m[k][n] += masked.data[q];
    }
    m[k][k] += neighbors;
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
    std::swap(m[col], m[pivot]);
    for (int row = col + 1; row < n; ++row) {
      double f = m[row][col] / m[col][col];
      for (int cc = col; cc <= n; ++cc) m[row][cc] -= f * m[col][cc];
    }
  }
  std::vector<double> exact(n);
  for (int row = n - 1; row >= 0; --row) {
    double acc = m[row][n];
    for (int cc = row + 1; cc < n; ++cc) acc -= m[row][cc] * exact[cc];
    exact[row] = acc / m[row][row];
  }

  InpaintResult result = inpaint_harmonic(masked, mask, kInpaintMaxIter, 0.01);
  double worst = 0;
  for (size_t k = 0; k < unknowns.size(); ++k)
    worst = std::max(worst, std::fabs(double(result.solution[unknowns[k]]) -
                                      exact[k]));
  c.note("max deviation " + fmt(worst, 3) + " levels");
  c.require(worst <= 0.5, "solver deviates more than 0.5 from direct solve");
}

void criterion_inpaint_improves(Criterion& c, const Corpus& corpus) {
  size_t improved = 0;
  for (size_t i = 0; i < corpus.images.size(); ++i) {
    SamrBitstream bs = samr_encode(corpus.images[i], corpus.segmaps[i],
                                   MaskConfig::preset(0), 10, 3, false);
    ImageBuffer decoded = decode(bs.jpeg);
    ImageBuffer reconstructed = samr_decode(bs, Reconstructor::harmonic());
    double before = psnr(corpus.images[i], decoded);
    double after = psnr(corpus.images[i], reconstructed);
    if (after > before) ++improved;
    c.note(corpus.items[i].stem + " " + fmt(before, 2) + " -> " +
           fmt(after, 2) + " dB");
  }
  double fraction = double(improved) / double(corpus.images.size());
  c.require(fraction >= 0.95, "inpainting improved only " +
                                  std::to_string(improved) + " of " +
                                  std::to_string(corpus.images.size()));
}

void criterion_determinism(Criterion& c, const Corpus& corpus) {
  const ImageBuffer& img = corpus.images[0];
  const SegMap& seg = corpus.segmaps[0];
  MaskConfig config = MaskConfig::preset(2);

  auto a = samr_encode(img, seg, config, 20, 1234, true);
  auto b = samr_encode(img, seg, config, 20, 1234, true);
  c.require(a.to_container().serialize() == b.to_container().serialize(),
            "samr bitstreams differ for identical inputs");

  PayloadContainer packed =
      mmsd_pack(img, seg, corpus.captions[0]);
  auto bytes = packed.serialize();
  auto unpacked = mmsd_unpack(packed, ClassTaxonomy::cityscapes34());
  PayloadContainer repacked = mmsd_repack(unpacked);
  c.require(repacked.serialize() == bytes,
            "mmsd pack -> unpack -> pack is not byte-identical");
}

void criterion_metric_oracles(Criterion& c) {
  using semwire::testing::noise_image;
  // brute-force implementations, written against the formulas
  auto psnr_naive = [](const ImageBuffer& a, const ImageBuffer& b) {
    double sq = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
      double d = double(a.data[i]) - double(b.data[i]);
      sq += d * d;
    }
    double mse = sq / double(a.data.size());
    if (mse == 0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
  };
  auto ssim_naive = [](const ImageBuffer& a, const ImageBuffer& b) {
    const int r = 5;
    double win[11][11], wsum = 0;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        win[dy + r][dx + r] =
            std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5));
        wsum += win[dy + r][dx + r];
      }
    for (auto& row : win)
      for (auto& v : row) v /= wsum;
    const double c1 = (0.01 * 255) * (0.01 * 255);
    const double c2 = (0.03 * 255) * (0.03 * 255);
    double acc = 0;
    size_t count = 0;
    for (int y = r; y < a.height - r; ++y)
      for (int x = r; x < a.width - r; ++x) {
        double mua = 0, mub = 0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            mua += win[dy + r][dx + r] * a.at(x + dx, y + dy, 0);
            mub += win[dy + r][dx + r] * b.at(x + dx, y + dy, 0);
          }
        double va = 0, vb = 0, cov = 0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            double da = a.at(x + dx, y + dy, 0) - mua;
            double db = b.at(x + dx, y + dy, 0) - mub;
            va += win[dy + r][dx + r] * da * da;
            vb += win[dy + r][dx + r] * db * db;
            cov += win[dy + r][dx + r] * da * db;
          }
        acc += ((2 * mua * mub + c1) * (2 * cov + c2)) /
               ((mua * mua + mub * mub + c1) * (va + vb + c2));
        ++count;
      }
    return acc / double(count);
  };

  for (int i = 0; i < 20; ++i) {
    ImageBuffer a = noise_image(64, 64, 1, 9000 + i);
    ImageBuffer b = noise_image(64, 64, 1, 9100 + i);
    c.require(std::fabs(psnr(a, b) - psnr_naive(a, b)) <= 1e-6,
              "psnr deviates from the brute-force oracle");
    c.require(std::fabs(ssim_single_scale(a, b) - ssim_naive(a, b)) <= 1e-6,
              "ssim deviates from the brute-force oracle");
  }

  ImageBuffer big = noise_image(192, 192, 3, 1);
  c.require(std::fabs(ms_ssim(big, big) - 1.0) <= 1e-9,
            "ms_ssim(a, a) != 1");
  c.require(std::isinf(psnr(big, big)), "psnr sentinel not honored");
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  Corpus corpus;
  try {
    corpus = build_corpus();
  } catch (const std::exception& e) {
    std::cerr << "failed to build acceptance corpus: " << e.what() << "\n";
    return 2;
  }

  struct Entry {
    int id;
    const char* name;
    std::function<void(Criterion&)> fn;
    double time_limit;  // seconds; 0 = none
  };
  const std::vector<Entry> entries = {
      {1, "masking statistics vs Table-2 rates",
       [&](Criterion& c) { criterion_masking_statistics(c); }, 5.0},
      {2, "masked JPEG never larger at equal Q",
       [&](Criterion& c) { criterion_compression_gain(c, corpus); }, 60.0},
      {3, "bitrate ordering config0 vs config7 at Q5",
       [&](Criterion& c) { criterion_bitrate_ordering(c, corpus); }, 0},
      {4, "JPEG Q5 anchor on Cityscapes",
       [&](Criterion& c) { criterion_jpeg_anchor(c); }, 0},
      {5, "MMSD payload accounting",
       [&](Criterion& c) { criterion_mmsd_payload(c, corpus); }, 0},
      {6, "harmonic solver vs dense direct solve",
       [&](Criterion& c) { criterion_inpaint_oracle(c); }, 1.0},
      {7, "inpainting improves PSNR at config0/Q10",
       [&](Criterion& c) { criterion_inpaint_improves(c, corpus); }, 0},
      {8, "determinism and byte-idempotent repack",
       [&](Criterion& c) { criterion_determinism(c, corpus); }, 0},
      {9, "metric oracles",
       [&](Criterion& c) { criterion_metric_oracles(c); }, 0},
  };

  bool all_ok = true;
  for (const auto& entry : entries) {
    Criterion c;
    c.id = entry.id;
    auto start = std::chrono::steady_clock::now();
    try {
      entry.fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    c.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (entry.time_limit > 0 && c.seconds > entry.time_limit)
      c.require(false, "runtime " + fmt(c.seconds, 1) + " s over the " +
                           fmt(entry.time_limit, 0) + " s limit");

    std::string status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
    std::cout << "[" << status << "] criterion " << entry.id << ": "
              << entry.name << " (" << fmt(c.seconds, 1) << " s)";
    if (!c.detail.empty()) std::cout << " -- " << c.detail;
    std::cout << "\n";
    if (!c.passed && !c.skipped) all_ok = false;
  }

  std::cout << (all_ok ? "acceptance: all criteria passed\n"
                       : "acceptance: FAILURES present\n");
  return all_ok ? 0 : 1;
}
