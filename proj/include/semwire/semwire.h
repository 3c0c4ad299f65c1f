/* semwire: semantic image compression toolkit.
 *
 * C API over the C++ core. All functions return semwire_status; outputs
 * come back through opaque handles that must be released with the
 * matching *_free call. semwire_last_error() describes the most recent
 * failure on the calling thread.
 */
#ifndef SEMWIRE_SEMWIRE_H_
#define SEMWIRE_SEMWIRE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SEMWIRE_API __declspec(dllexport)
#else
#define SEMWIRE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum semwire_status {
  SEMWIRE_OK = 0,
  SEMWIRE_ERR_IO = 1,
  SEMWIRE_ERR_FORMAT = 2,
  SEMWIRE_ERR_LABEL = 3,
  SEMWIRE_ERR_CONTAINER = 4,
  SEMWIRE_ERR_CODEC = 5,
  SEMWIRE_ERR_DIMENSION = 6,
  SEMWIRE_ERR_RLE = 7,
  SEMWIRE_ERR_EXTERNAL = 8,
  SEMWIRE_ERR_CSV = 9,
  SEMWIRE_ERR_INVALID = 10,
  SEMWIRE_ERR_INTERNAL = 11,
} semwire_status;

SEMWIRE_API const char* semwire_status_name(semwire_status status);
SEMWIRE_API const char* semwire_last_error(void);
SEMWIRE_API const char* semwire_version(void);

/* ---- images ---- */

typedef struct semwire_image semwire_image;

SEMWIRE_API semwire_status semwire_image_load(const char* path,
                                              semwire_image** out);
SEMWIRE_API semwire_status semwire_image_from_pixels(int width, int height,
                                                     int channels,
                                                     const uint8_t* data,
                                                     semwire_image** out);
SEMWIRE_API semwire_status semwire_image_save_png(const semwire_image* img,
                                                  const char* path);
/* Lossless WebP. */
SEMWIRE_API semwire_status semwire_image_save_webp(const semwire_image* img,
                                                   const char* path);
SEMWIRE_API int semwire_image_width(const semwire_image* img);
SEMWIRE_API int semwire_image_height(const semwire_image* img);
SEMWIRE_API int semwire_image_channels(const semwire_image* img);
SEMWIRE_API const uint8_t* semwire_image_data(const semwire_image* img);
SEMWIRE_API void semwire_image_free(semwire_image* img);

/* ---- taxonomy and segmentation maps ---- */

typedef struct semwire_taxonomy semwire_taxonomy;
typedef struct semwire_segmap semwire_segmap;

/* Built-in Cityscapes 34-class table. */
SEMWIRE_API semwire_status semwire_taxonomy_default(semwire_taxonomy** out);
SEMWIRE_API semwire_status semwire_taxonomy_load(const char* path,
                                                 semwire_taxonomy** out);
SEMWIRE_API int semwire_taxonomy_num_classes(const semwire_taxonomy* tax);
SEMWIRE_API void semwire_taxonomy_free(semwire_taxonomy* tax);

SEMWIRE_API semwire_status semwire_segmap_load(const char* path,
                                               const semwire_taxonomy* tax,
                                               semwire_segmap** out);
SEMWIRE_API int semwire_segmap_width(const semwire_segmap* seg);
SEMWIRE_API int semwire_segmap_height(const semwire_segmap* seg);
SEMWIRE_API void semwire_segmap_free(semwire_segmap* seg);

/* ---- edges ---- */

SEMWIRE_API semwire_status semwire_grayscale(const semwire_image* img,
                                             semwire_image** out);
/* Binary edge map (values 0/255, single channel) at source resolution. */
SEMWIRE_API semwire_status semwire_canny(const semwire_image* img, double low,
                                         double high, semwire_image** out);

/* ---- masking ---- */

typedef struct semwire_mask_config semwire_mask_config;
typedef struct semwire_mask semwire_mask;

SEMWIRE_API semwire_status semwire_config_preset(int id,
                                                 semwire_mask_config** out);
SEMWIRE_API semwire_status semwire_config_load(const char* path,
                                               semwire_mask_config** out);
/* group index follows the order: vehicles, humans, flat_surfaces,
 * construction, objects, nature, sky, background. */
SEMWIRE_API double semwire_config_rho(const semwire_mask_config* config,
                                      int group);
SEMWIRE_API void semwire_config_free(semwire_mask_config* config);

SEMWIRE_API semwire_status semwire_semantic_mask(const semwire_segmap* seg,
                                                 const semwire_mask_config* config,
                                                 int image_w, int image_h,
                                                 uint64_t seed,
                                                 semwire_mask** out);
SEMWIRE_API semwire_status semwire_random_mask(int image_w, int image_h,
                                               double rho, uint64_t seed,
                                               semwire_mask** out);
SEMWIRE_API int semwire_mask_rows(const semwire_mask* mask);
SEMWIRE_API int semwire_mask_cols(const semwire_mask* mask);
SEMWIRE_API int semwire_mask_get(const semwire_mask* mask, int i, int j);
SEMWIRE_API size_t semwire_mask_count(const semwire_mask* mask);
SEMWIRE_API semwire_status semwire_mask_apply(const semwire_image* img,
                                              const semwire_mask* mask,
                                              semwire_image** out);
/* Grid-resolution visualization (0 = kept, 255 = masked). */
SEMWIRE_API semwire_status semwire_mask_to_image(const semwire_mask* mask,
                                                 semwire_image** out);
SEMWIRE_API void semwire_mask_free(semwire_mask* mask);

/* ---- MMSD pipeline ---- */

typedef struct semwire_mmsd_options {
  int seg_target_w; /* <= 0 picks the default 1024 */
  int seg_target_h; /* <= 0 picks the default 512 */
  double canny_low; /* < 0 picks the default 100 */
  double canny_high; /* < 0 picks the default 200 */
} semwire_mmsd_options;

SEMWIRE_API void semwire_mmsd_options_init(semwire_mmsd_options* opts);

SEMWIRE_API semwire_status semwire_mmsd_pack(const semwire_image* img,
                                             const semwire_segmap* seg,
                                             const char* caption_utf8,
                                             const semwire_mmsd_options* opts,
                                             const char* out_path);
/* Writes <stem>_seg.png, <stem>_edge.png, <stem>_caption.txt and
 * <stem>_met.json into out_dir (stem = "payload"). */
SEMWIRE_API semwire_status semwire_mmsd_unpack(const char* smc_path,
                                               const semwire_taxonomy* tax,
                                               const char* out_dir);
/* Optional external decoder hook; cmd may contain {seg} {edge} {caption}
 * {out} placeholders. Pass NULL to skip reconstruction. */
SEMWIRE_API semwire_status semwire_mmsd_reconstruct(const char* smc_path,
                                                    const semwire_taxonomy* tax,
                                                    const char* cmd_template,
                                                    const char* work_dir,
                                                    const char* out_png);
SEMWIRE_API semwire_status semwire_compression_ratio(const char* original_path,
                                                     const char* smc_path,
                                                     double* out_ratio);

/* ---- SAMR pipeline ---- */

SEMWIRE_API semwire_status semwire_samr_encode(const semwire_image* img,
                                               const semwire_segmap* seg,
                                               const semwire_mask_config* config,
                                               int quality, uint64_t seed,
                                               int with_mask_side_channel,
                                               const char* out_path);
/* reconstructor: "harmonic" or "ext:<command with {in} {mask} {out}>". */
SEMWIRE_API semwire_status semwire_samr_decode(const char* smc_path,
                                               const char* reconstructor,
                                               const char* out_png);

/* ---- metrics ---- */

SEMWIRE_API semwire_status semwire_psnr(const semwire_image* a,
                                        const semwire_image* b, double* out);
SEMWIRE_API semwire_status semwire_ms_ssim(const semwire_image* a,
                                           const semwire_image* b,
                                           double* out);
SEMWIRE_API double semwire_bpp(uint64_t payload_bytes, int width, int height);

/* ---- containers ---- */

typedef struct semwire_container semwire_container;

SEMWIRE_API semwire_status semwire_container_open(const char* path,
                                                  semwire_container** out);
SEMWIRE_API size_t semwire_container_entry_count(const semwire_container* c);
/* Returns the 3-character tag of entry i (NUL-terminated static copy). */
SEMWIRE_API const char* semwire_container_entry_tag(const semwire_container* c,
                                                    size_t i);
SEMWIRE_API size_t semwire_container_entry_size(const semwire_container* c,
                                                size_t i);
SEMWIRE_API size_t semwire_container_total_bytes(const semwire_container* c);
SEMWIRE_API void semwire_container_free(semwire_container* c);

/* ---- rate-distortion harness ---- */

typedef struct semwire_sweep_plan semwire_sweep_plan;

SEMWIRE_API semwire_status semwire_sweep_plan_new(semwire_sweep_plan** out);
SEMWIRE_API semwire_status semwire_sweep_set_corpus(semwire_sweep_plan* plan,
                                                    const char* dir);
SEMWIRE_API semwire_status semwire_sweep_set_output(semwire_sweep_plan* plan,
                                                    const char* dir);
/* mode: "jpeg", "samr" or "mmsd"; call once per mode. */
SEMWIRE_API semwire_status semwire_sweep_add_mode(semwire_sweep_plan* plan,
                                                  const char* mode);
SEMWIRE_API semwire_status semwire_sweep_set_qualities(semwire_sweep_plan* plan,
                                                       const int* q, size_t n);
SEMWIRE_API semwire_status semwire_sweep_set_configs(semwire_sweep_plan* plan,
                                                     const int* ids, size_t n);
SEMWIRE_API semwire_status semwire_sweep_set_seed(semwire_sweep_plan* plan,
                                                  uint64_t seed);
SEMWIRE_API semwire_status semwire_sweep_set_reconstructor(
    semwire_sweep_plan* plan, const char* spec);
SEMWIRE_API semwire_status semwire_sweep_set_jobs(semwire_sweep_plan* plan,
                                                  int jobs);
SEMWIRE_API semwire_status semwire_sweep_run(semwire_sweep_plan* plan);
SEMWIRE_API void semwire_sweep_plan_free(semwire_sweep_plan* plan);

SEMWIRE_API semwire_status semwire_plot_rd(const char* csv_path,
                                           const char* output_dir);

/* ---- synthetic corpus ---- */

SEMWIRE_API semwire_status semwire_synth_corpus(const char* dir, int count,
                                                int width, int height,
                                                uint64_t seed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SEMWIRE_SEMWIRE_H_ */
