#include "semwire/semwire.h"

#include <cstring>
#include <string>

#include "canny.hpp"
#include "codec.hpp"
#include "container.hpp"
#include "error.hpp"
#include "imageio.hpp"
#include "masking.hpp"
#include "metrics.hpp"
#include "mmsd.hpp"
#include "plot.hpp"
#include "samr.hpp"
#include "segmap.hpp"
#include "sweep.hpp"
#include "synth.hpp"
#include "taxonomy.hpp"

// Opaque handle definitions. Each wraps one value-semantic core object.
struct semwire_image {
  semwire::ImageBuffer value;
};
struct semwire_taxonomy {
  std::shared_ptr<const semwire::ClassTaxonomy> value;
};
struct semwire_segmap {
  semwire::SegMap value;
};
struct semwire_mask_config {
  semwire::MaskConfig value;
};
struct semwire_mask {
  semwire::PatchMask value;
};
struct semwire_container {
  semwire::PayloadContainer value;
};
struct semwire_sweep_plan {
  semwire::SweepPlan value;
};

namespace {

thread_local std::string g_last_error;

semwire_status status_of(semwire::ErrorCode code) {
  using semwire::ErrorCode;
  switch (code) {
    case ErrorCode::Io: return SEMWIRE_ERR_IO;
    case ErrorCode::Format: return SEMWIRE_ERR_FORMAT;
    case ErrorCode::Label: return SEMWIRE_ERR_LABEL;
    case ErrorCode::Container: return SEMWIRE_ERR_CONTAINER;
    case ErrorCode::Codec: return SEMWIRE_ERR_CODEC;
    case ErrorCode::Dimension: return SEMWIRE_ERR_DIMENSION;
    case ErrorCode::Rle: return SEMWIRE_ERR_RLE;
    case ErrorCode::External: return SEMWIRE_ERR_EXTERNAL;
    case ErrorCode::Csv: return SEMWIRE_ERR_CSV;
    case ErrorCode::InvalidArgument: return SEMWIRE_ERR_INVALID;
    case ErrorCode::Internal: return SEMWIRE_ERR_INTERNAL;
  }
  return SEMWIRE_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes + the thread-local
// error message.
template <typename Fn>
semwire_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SEMWIRE_OK;
  } catch (const semwire::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SEMWIRE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SEMWIRE_ERR_INTERNAL;
  }
}

semwire_status require(bool condition, const char* message) {
  if (condition) return SEMWIRE_OK;
  g_last_error = message;
  return SEMWIRE_ERR_INVALID;
}

semwire::MmsdOptions to_core_options(const semwire_mmsd_options* opts) {
  semwire::MmsdOptions core;
  if (!opts) return core;
  if (opts->seg_target_w > 0) core.seg_target_w = opts->seg_target_w;
  if (opts->seg_target_h > 0) core.seg_target_h = opts->seg_target_h;
  if (opts->canny_low >= 0) core.canny_low = opts->canny_low;
  if (opts->canny_high >= 0) core.canny_high = opts->canny_high;
  return core;
}

}  // namespace

extern "C" {

const char* semwire_status_name(semwire_status status) {
  switch (status) {
    case SEMWIRE_OK: return "ok";
    case SEMWIRE_ERR_IO: return "io";
    case SEMWIRE_ERR_FORMAT: return "format";
    case SEMWIRE_ERR_LABEL: return "label";
    case SEMWIRE_ERR_CONTAINER: return "container";
    case SEMWIRE_ERR_CODEC: return "codec";
    case SEMWIRE_ERR_DIMENSION: return "dimension";
    case SEMWIRE_ERR_RLE: return "rle";
    case SEMWIRE_ERR_EXTERNAL: return "external";
    case SEMWIRE_ERR_CSV: return "csv";
    case SEMWIRE_ERR_INVALID: return "invalid";
    case SEMWIRE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* semwire_last_error(void) { return g_last_error.c_str(); }

const char* semwire_version(void) { return "0.1.0"; }

/* ---- images ---- */

semwire_status semwire_image_load(const char* path, semwire_image** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] { *out = new semwire_image{semwire::load_image(path)}; });
}

semwire_status semwire_image_from_pixels(int width, int height, int channels,
                                         const uint8_t* data,
                                         semwire_image** out) {
  if (auto s = require(data && out, "data and out must be non-null")) return s;
  return guarded([&] {
    semwire::ImageBuffer img =
        semwire::ImageBuffer::create(width, height, channels);
    std::memcpy(img.data.data(), data, img.data.size());
    *out = new semwire_image{std::move(img)};
  });
}

semwire_status semwire_image_save_png(const semwire_image* img,
                                      const char* path) {
  if (auto s = require(img && path, "img and path must be non-null")) return s;
  return guarded([&] { semwire::save_png(img->value, path); });
}

semwire_status semwire_image_save_webp(const semwire_image* img,
                                       const char* path) {
  if (auto s = require(img && path, "img and path must be non-null")) return s;
  return guarded([&] {
    semwire::EncodedBlob blob =
        semwire::encode(img->value, semwire::CodecFormat::WebpLossless, 0);
    semwire::write_file(path, blob.bytes);
  });
}

int semwire_image_width(const semwire_image* img) {
  return img ? img->value.width : 0;
}
int semwire_image_height(const semwire_image* img) {
  return img ? img->value.height : 0;
}
int semwire_image_channels(const semwire_image* img) {
  return img ? img->value.channels : 0;
}
const uint8_t* semwire_image_data(const semwire_image* img) {
  return img ? img->value.data.data() : nullptr;
}
void semwire_image_free(semwire_image* img) { delete img; }

/* ---- taxonomy and segmentation maps ---- */

semwire_status semwire_taxonomy_default(semwire_taxonomy** out) {
  if (auto s = require(out != nullptr, "out must be non-null")) return s;
  return guarded([&] {
    *out = new semwire_taxonomy{semwire::ClassTaxonomy::cityscapes34()};
  });
}

semwire_status semwire_taxonomy_load(const char* path, semwire_taxonomy** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    *out = new semwire_taxonomy{std::make_shared<semwire::ClassTaxonomy>(
        semwire::ClassTaxonomy::load(path))};
  });
}

int semwire_taxonomy_num_classes(const semwire_taxonomy* tax) {
  return tax ? tax->value->num_classes() : 0;
}
void semwire_taxonomy_free(semwire_taxonomy* tax) { delete tax; }

semwire_status semwire_segmap_load(const char* path,
                                   const semwire_taxonomy* tax,
                                   semwire_segmap** out) {
  if (auto s = require(path && tax && out, "arguments must be non-null"))
    return s;
  return guarded([&] {
    *out = new semwire_segmap{semwire::load_segmap(path, tax->value)};
  });
}

int semwire_segmap_width(const semwire_segmap* seg) {
  return seg ? seg->value.width : 0;
}
int semwire_segmap_height(const semwire_segmap* seg) {
  return seg ? seg->value.height : 0;
}
void semwire_segmap_free(semwire_segmap* seg) { delete seg; }

/* ---- edges ---- */

semwire_status semwire_grayscale(const semwire_image* img,
                                 semwire_image** out) {
  if (auto s = require(img && out, "img and out must be non-null")) return s;
  return guarded(
      [&] { *out = new semwire_image{semwire::to_grayscale(img->value)}; });
}

semwire_status semwire_canny(const semwire_image* img, double low, double high,
                             semwire_image** out) {
  if (auto s = require(img && out, "img and out must be non-null")) return s;
  return guarded([&] {
    *out = new semwire_image{
        semwire::canny(semwire::to_grayscale(img->value), low, high)};
  });
}

/* ---- masking ---- */

semwire_status semwire_config_preset(int id, semwire_mask_config** out) {
  if (auto s = require(out != nullptr, "out must be non-null")) return s;
  return guarded([&] {
    *out = new semwire_mask_config{semwire::MaskConfig::preset(id)};
  });
}

semwire_status semwire_config_load(const char* path,
                                   semwire_mask_config** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    *out = new semwire_mask_config{semwire::MaskConfig::load(path)};
  });
}

double semwire_config_rho(const semwire_mask_config* config, int group) {
  if (!config || group < 0 || group >= semwire::kNumGroups) return -1.0;
  return config->value.rho[group];
}
void semwire_config_free(semwire_mask_config* config) { delete config; }

semwire_status semwire_semantic_mask(const semwire_segmap* seg,
                                     const semwire_mask_config* config,
                                     int image_w, int image_h, uint64_t seed,
                                     semwire_mask** out) {
  if (auto s = require(seg && config && out, "arguments must be non-null"))
    return s;
  return guarded([&] {
    semwire::PatchGrid grid = semwire::PatchGrid::for_image(image_w, image_h);
    *out = new semwire_mask{
        semwire::semantic_mask(seg->value, config->value, grid, seed)};
  });
}

semwire_status semwire_random_mask(int image_w, int image_h, double rho,
                                   uint64_t seed, semwire_mask** out) {
  if (auto s = require(out != nullptr, "out must be non-null")) return s;
  return guarded([&] {
    semwire::PatchGrid grid = semwire::PatchGrid::for_image(image_w, image_h);
    *out = new semwire_mask{semwire::random_mask(grid, rho, seed)};
  });
}

int semwire_mask_rows(const semwire_mask* mask) {
  return mask ? mask->value.n_h : 0;
}
int semwire_mask_cols(const semwire_mask* mask) {
  return mask ? mask->value.n_w : 0;
}
int semwire_mask_get(const semwire_mask* mask, int i, int j) {
  if (!mask || i < 0 || i >= mask->value.n_h || j < 0 || j >= mask->value.n_w)
    return -1;
  return mask->value.at(i, j) ? 1 : 0;
}
size_t semwire_mask_count(const semwire_mask* mask) {
  return mask ? mask->value.count() : 0;
}

semwire_status semwire_mask_apply(const semwire_image* img,
                                  const semwire_mask* mask,
                                  semwire_image** out) {
  if (auto s = require(img && mask && out, "arguments must be non-null"))
    return s;
  return guarded([&] {
    *out = new semwire_image{semwire::apply_mask(img->value, mask->value)};
  });
}

semwire_status semwire_mask_to_image(const semwire_mask* mask,
                                     semwire_image** out) {
  if (auto s = require(mask && out, "mask and out must be non-null")) return s;
  return guarded([&] {
    semwire::ImageBuffer img =
        semwire::ImageBuffer::create(mask->value.n_w, mask->value.n_h, 1);
    for (int i = 0; i < mask->value.n_h; ++i)
      for (int j = 0; j < mask->value.n_w; ++j)
        img.at(j, i, 0) = mask->value.at(i, j) ? 255 : 0;
    *out = new semwire_image{std::move(img)};
  });
}

void semwire_mask_free(semwire_mask* mask) { delete mask; }

/* ---- MMSD ---- */

void semwire_mmsd_options_init(semwire_mmsd_options* opts) {
  if (!opts) return;
  opts->seg_target_w = 1024;
  opts->seg_target_h = 512;
  opts->canny_low = semwire::kDefaultCannyLow;
  opts->canny_high = semwire::kDefaultCannyHigh;
}

semwire_status semwire_mmsd_pack(const semwire_image* img,
                                 const semwire_segmap* seg,
                                 const char* caption_utf8,
                                 const semwire_mmsd_options* opts,
                                 const char* out_path) {
  if (auto s = require(img && seg && caption_utf8 && out_path,
                       "arguments must be non-null"))
    return s;
  return guarded([&] {
    semwire::Caption caption{caption_utf8};
    semwire::PayloadContainer container = semwire::mmsd_pack(
        img->value, seg->value, caption, to_core_options(opts));
    container.save(out_path);
  });
}

semwire_status semwire_mmsd_unpack(const char* smc_path,
                                   const semwire_taxonomy* tax,
                                   const char* out_dir) {
  if (auto s = require(smc_path && tax && out_dir,
                       "arguments must be non-null"))
    return s;
  return guarded([&] {
    auto container = semwire::PayloadContainer::load(smc_path);
    auto unpacked = semwire::mmsd_unpack(container, tax->value);
    semwire::mmsd_export(unpacked, out_dir, "payload");
  });
}

semwire_status semwire_mmsd_reconstruct(const char* smc_path,
                                        const semwire_taxonomy* tax,
                                        const char* cmd_template,
                                        const char* work_dir,
                                        const char* out_png) {
  if (auto s = require(smc_path && tax && cmd_template && work_dir && out_png,
                       "arguments must be non-null"))
    return s;
  return guarded([&] {
    auto container = semwire::PayloadContainer::load(smc_path);
    auto unpacked = semwire::mmsd_unpack(container, tax->value);
    semwire::ImageBuffer img =
        semwire::run_reconstruct_cmd(cmd_template, unpacked, work_dir);
    semwire::save_png(img, out_png);
  });
}

semwire_status semwire_compression_ratio(const char* original_path,
                                         const char* smc_path,
                                         double* out_ratio) {
  if (auto s = require(original_path && smc_path && out_ratio,
                       "arguments must be non-null"))
    return s;
  return guarded([&] {
    auto container = semwire::PayloadContainer::load(smc_path);
    *out_ratio = semwire::compression_ratio(original_path, container);
  });
}

/* ---- SAMR ---- */

semwire_status semwire_samr_encode(const semwire_image* img,
                                   const semwire_segmap* seg,
                                   const semwire_mask_config* config,
                                   int quality, uint64_t seed,
                                   int with_mask_side_channel,
                                   const char* out_path) {
  if (auto s = require(img && seg && config && out_path,
                       "arguments must be non-null"))
    return s;
  return guarded([&] {
    semwire::SamrBitstream bs =
        semwire::samr_encode(img->value, seg->value, config->value, quality,
                             seed, with_mask_side_channel != 0);
    bs.to_container().save(out_path);
  });
}

semwire_status semwire_samr_decode(const char* smc_path,
                                   const char* reconstructor,
                                   const char* out_png) {
  if (auto s = require(smc_path && out_png, "arguments must be non-null"))
    return s;
  return guarded([&] {
    auto container = semwire::PayloadContainer::load(smc_path);
    auto bs = semwire::SamrBitstream::from_container(container);
    semwire::Reconstructor rec =
        semwire::Reconstructor::parse(reconstructor ? reconstructor
                                                    : "harmonic");
    semwire::ImageBuffer img = semwire::samr_decode(bs, rec);
    semwire::save_png(img, out_png);
  });
}

/* ---- metrics ---- */

semwire_status semwire_psnr(const semwire_image* a, const semwire_image* b,
                            double* out) {
  if (auto s = require(a && b && out, "arguments must be non-null")) return s;
  return guarded([&] { *out = semwire::psnr(a->value, b->value); });
}

semwire_status semwire_ms_ssim(const semwire_image* a, const semwire_image* b,
                               double* out) {
  if (auto s = require(a && b && out, "arguments must be non-null")) return s;
  return guarded([&] { *out = semwire::ms_ssim(a->value, b->value); });
}

double semwire_bpp(uint64_t payload_bytes, int width, int height) {
  if (width <= 0 || height <= 0) return -1.0;
  return semwire::bpp(payload_bytes, width, height);
}

/* ---- containers ---- */

semwire_status semwire_container_open(const char* path,
                                      semwire_container** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] {
    *out = new semwire_container{semwire::PayloadContainer::load(path)};
  });
}

size_t semwire_container_entry_count(const semwire_container* c) {
  return c ? c->value.entries.size() : 0;
}

const char* semwire_container_entry_tag(const semwire_container* c, size_t i) {
  static thread_local char tag[4];
  if (!c || i >= c->value.entries.size()) return nullptr;
  std::memcpy(tag, c->value.entries[i].tag.data(), 3);
  tag[3] = '\0';
  return tag;
}

size_t semwire_container_entry_size(const semwire_container* c, size_t i) {
  if (!c || i >= c->value.entries.size()) return 0;
  return c->value.entries[i].body.size();
}

size_t semwire_container_total_bytes(const semwire_container* c) {
  return c ? c->value.total_bytes() : 0;
}

void semwire_container_free(semwire_container* c) { delete c; }

/* ---- harness ---- */

semwire_status semwire_sweep_plan_new(semwire_sweep_plan** out) {
  if (auto s = require(out != nullptr, "out must be non-null")) return s;
  return guarded([&] {
    auto* plan = new semwire_sweep_plan{};
    plan->value.modes.clear();
    *out = plan;
  });
}

semwire_status semwire_sweep_set_corpus(semwire_sweep_plan* plan,
                                        const char* dir) {
  if (auto s = require(plan && dir, "arguments must be non-null")) return s;
  plan->value.corpus_dir = dir;
  return SEMWIRE_OK;
}

semwire_status semwire_sweep_set_output(semwire_sweep_plan* plan,
                                        const char* dir) {
  if (auto s = require(plan && dir, "arguments must be non-null")) return s;
  plan->value.output_dir = dir;
  return SEMWIRE_OK;
}

semwire_status semwire_sweep_add_mode(semwire_sweep_plan* plan,
                                      const char* mode) {
  if (auto s = require(plan && mode, "arguments must be non-null")) return s;
  std::string m = mode;
  if (m == "jpeg")
    plan->value.modes.push_back(semwire::SweepMode::JpegOnly);
  else if (m == "samr")
    plan->value.modes.push_back(semwire::SweepMode::Samr);
  else if (m == "mmsd")
    plan->value.modes.push_back(semwire::SweepMode::MmsdPayload);
  else
    return require(false, "mode must be jpeg, samr or mmsd");
  return SEMWIRE_OK;
}

semwire_status semwire_sweep_set_qualities(semwire_sweep_plan* plan,
                                           const int* q, size_t n) {
  if (auto s = require(plan && q && n > 0, "arguments must be non-null"))
    return s;
  plan->value.qualities.assign(q, q + n);
  return SEMWIRE_OK;
}

semwire_status semwire_sweep_set_configs(semwire_sweep_plan* plan,
                                         const int* ids, size_t n) {
  if (auto s = require(plan && ids && n > 0, "arguments must be non-null"))
    return s;
  plan->value.configs.assign(ids, ids + n);
  return SEMWIRE_OK;
}

semwire_status semwire_sweep_set_seed(semwire_sweep_plan* plan, uint64_t seed) {
  if (auto s = require(plan != nullptr, "plan must be non-null")) return s;
  plan->value.seed = seed;
  return SEMWIRE_OK;
}

semwire_status semwire_sweep_set_reconstructor(semwire_sweep_plan* plan,
                                               const char* spec) {
  if (auto s = require(plan && spec, "arguments must be non-null")) return s;
  return guarded(
      [&] { plan->value.reconstructor = semwire::Reconstructor::parse(spec); });
}

semwire_status semwire_sweep_set_jobs(semwire_sweep_plan* plan, int jobs) {
  if (auto s = require(plan != nullptr, "plan must be non-null")) return s;
  plan->value.jobs = jobs;
  return SEMWIRE_OK;
}

semwire_status semwire_sweep_run(semwire_sweep_plan* plan) {
  if (auto s = require(plan != nullptr, "plan must be non-null")) return s;
  return guarded([&] {
    if (plan->value.modes.empty()) {
      plan->value.modes = {semwire::SweepMode::JpegOnly,
                           semwire::SweepMode::Samr};
    }
    semwire::run_sweep(plan->value);
  });
}

void semwire_sweep_plan_free(semwire_sweep_plan* plan) { delete plan; }

semwire_status semwire_plot_rd(const char* csv_path, const char* output_dir) {
  if (auto s = require(csv_path && output_dir, "arguments must be non-null"))
    return s;
  return guarded([&] { semwire::plot_rd(csv_path, output_dir); });
}

/* ---- synthetic corpus ---- */

semwire_status semwire_synth_corpus(const char* dir, int count, int width,
                                    int height, uint64_t seed) {
  if (auto s = require(dir != nullptr, "dir must be non-null")) return s;
  return guarded([&] {
    semwire::SynthCorpusOptions opts;
    if (count > 0) opts.count = count;
    if (width > 0) opts.width = width;
    if (height > 0) opts.height = height;
    opts.seed = seed;
    semwire::synth_corpus(dir, opts);
  });
}

} /* extern "C" */
