// Exercises the shared-library surface exactly as an external consumer
// would: through semwire/semwire.h only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "semwire/semwire.h"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path;
  Scratch(const char* name) {
    path = fs::temp_directory_path() / "semwire_capi" /
           (std::string(name) + "_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(semwire_status_name(SEMWIRE_OK)) == "ok");
  CHECK(std::string(semwire_status_name(SEMWIRE_ERR_IO)) == "io");
  CHECK(std::string(semwire_status_name(SEMWIRE_ERR_CODEC)) == "codec");
  CHECK(semwire_version() != nullptr);
}

TEST_CASE("null arguments are rejected with SEMWIRE_ERR_INVALID") {
  CHECK(semwire_image_load(nullptr, nullptr) == SEMWIRE_ERR_INVALID);
  CHECK(std::strlen(semwire_last_error()) > 0);
  CHECK(semwire_psnr(nullptr, nullptr, nullptr) == SEMWIRE_ERR_INVALID);
  CHECK(semwire_bpp(100, 0, 0) == -1.0);
}

TEST_CASE("missing files surface as io errors with a message") {
  semwire_image* img = nullptr;
  CHECK(semwire_image_load("/nonexistent/file.png", &img) == SEMWIRE_ERR_IO);
  CHECK(img == nullptr);
  CHECK(std::strlen(semwire_last_error()) > 0);
}

TEST_CASE("end-to-end pipeline through the C surface") {
  Scratch dir("pipeline");

  // synthetic corpus
  REQUIRE(semwire_synth_corpus(dir.file("corpus").c_str(), 2, 256, 128, 7) ==
          SEMWIRE_OK);
  std::string image_path = dir.file("corpus") + "/scene_000.png";
  std::string labels_path = dir.file("corpus") + "/scene_000.labels.png";
  REQUIRE(fs::exists(image_path));
  REQUIRE(fs::exists(labels_path));

  // image handles
  semwire_image* img = nullptr;
  REQUIRE(semwire_image_load(image_path.c_str(), &img) == SEMWIRE_OK);
  CHECK(semwire_image_width(img) == 256);
  CHECK(semwire_image_height(img) == 128);
  CHECK(semwire_image_channels(img) == 3);
  CHECK(semwire_image_data(img) != nullptr);

  // taxonomy + segmap
  semwire_taxonomy* tax = nullptr;
  REQUIRE(semwire_taxonomy_default(&tax) == SEMWIRE_OK);
  CHECK(semwire_taxonomy_num_classes(tax) == 34);
  semwire_segmap* seg = nullptr;
  REQUIRE(semwire_segmap_load(labels_path.c_str(), tax, &seg) == SEMWIRE_OK);
  CHECK(semwire_segmap_width(seg) == 256);

  // edges
  semwire_image* edges = nullptr;
  REQUIRE(semwire_canny(img, 100, 200, &edges) == SEMWIRE_OK);
  CHECK(semwire_image_channels(edges) == 1);
  REQUIRE(semwire_image_save_png(edges, dir.file("edges.png").c_str()) ==
          SEMWIRE_OK);
  REQUIRE(semwire_image_save_webp(edges, dir.file("edges.webp").c_str()) ==
          SEMWIRE_OK);

  // config + masks
  semwire_mask_config* config = nullptr;
  REQUIRE(semwire_config_preset(0, &config) == SEMWIRE_OK);
  CHECK(semwire_config_rho(config, 0) == 0.0);  // vehicles
  CHECK(semwire_config_rho(config, 7) == 0.8);  // background
  CHECK(semwire_config_preset(42, &config) == SEMWIRE_ERR_INVALID);

  semwire_mask* mask = nullptr;
  REQUIRE(semwire_semantic_mask(seg, config, 256, 128, 11, &mask) ==
          SEMWIRE_OK);
  CHECK(semwire_mask_rows(mask) == 16);
  CHECK(semwire_mask_cols(mask) == 32);
  CHECK(semwire_mask_get(mask, 0, 0) >= 0);
  CHECK(semwire_mask_count(mask) > 0);

  semwire_mask* rmask = nullptr;
  REQUIRE(semwire_random_mask(256, 128, 0.25, 3, &rmask) == SEMWIRE_OK);
  CHECK(semwire_mask_count(rmask) == size_t(0.25 * 16 * 32));

  semwire_image* masked = nullptr;
  REQUIRE(semwire_mask_apply(img, mask, &masked) == SEMWIRE_OK);
  semwire_image* mask_img = nullptr;
  REQUIRE(semwire_mask_to_image(mask, &mask_img) == SEMWIRE_OK);
  CHECK(semwire_image_width(mask_img) == 32);

  // metrics
  double value = 0;
  REQUIRE(semwire_psnr(img, img, &value) == SEMWIRE_OK);
  CHECK(std::isinf(value));
  REQUIRE(semwire_psnr(img, masked, &value) == SEMWIRE_OK);
  CHECK(value > 0.0);
  REQUIRE(semwire_ms_ssim(img, img, &value) == SEMWIRE_OK);
  CHECK(value == doctest::Approx(1.0));
  CHECK(semwire_bpp(65536, 2048, 1024) == doctest::Approx(0.25));

  // samr round trip
  std::string samr_path = dir.file("frame.smc");
  REQUIRE(semwire_samr_encode(img, seg, config, 30, 11, 1,
                              samr_path.c_str()) == SEMWIRE_OK);
  std::string decoded_path = dir.file("decoded.png");
  REQUIRE(semwire_samr_decode(samr_path.c_str(), "harmonic",
                              decoded_path.c_str()) == SEMWIRE_OK);
  semwire_image* decoded = nullptr;
  REQUIRE(semwire_image_load(decoded_path.c_str(), &decoded) == SEMWIRE_OK);
  CHECK(semwire_image_width(decoded) == 256);
  REQUIRE(semwire_psnr(img, decoded, &value) == SEMWIRE_OK);
  CHECK(value > 15.0);

  // container introspection
  semwire_container* container = nullptr;
  REQUIRE(semwire_container_open(samr_path.c_str(), &container) == SEMWIRE_OK);
  REQUIRE(semwire_container_entry_count(container) == 3);  // MET, JPG, MSK
  CHECK(std::string(semwire_container_entry_tag(container, 0)) == "MET");
  CHECK(std::string(semwire_container_entry_tag(container, 1)) == "JPG");
  CHECK(std::string(semwire_container_entry_tag(container, 2)) == "MSK");
  CHECK(semwire_container_entry_size(container, 1) > 0);
  CHECK(semwire_container_total_bytes(container) ==
        fs::file_size(samr_path));

  // mmsd round trip
  std::string mmsd_path = dir.file("payload.smc");
  semwire_mmsd_options opts;
  semwire_mmsd_options_init(&opts);
  REQUIRE(semwire_mmsd_pack(img, seg, "two cars on a street", &opts,
                            mmsd_path.c_str()) == SEMWIRE_OK);
  REQUIRE(semwire_mmsd_unpack(mmsd_path.c_str(), tax,
                              dir.file("unpacked").c_str()) == SEMWIRE_OK);
  CHECK(fs::exists(dir.file("unpacked") + "/payload_seg.png"));
  CHECK(fs::exists(dir.file("unpacked") + "/payload_edge.png"));
  CHECK(fs::exists(dir.file("unpacked") + "/payload_caption.txt"));

  double ratio = 0;
  REQUIRE(semwire_compression_ratio(image_path.c_str(), mmsd_path.c_str(),
                                    &ratio) == SEMWIRE_OK);
  CHECK(ratio > 1.0);

  // sweep + plots
  semwire_sweep_plan* plan = nullptr;
  REQUIRE(semwire_sweep_plan_new(&plan) == SEMWIRE_OK);
  REQUIRE(semwire_sweep_set_corpus(plan, dir.file("corpus").c_str()) ==
          SEMWIRE_OK);
  REQUIRE(semwire_sweep_set_output(plan, dir.file("out").c_str()) ==
          SEMWIRE_OK);
  REQUIRE(semwire_sweep_add_mode(plan, "jpeg") == SEMWIRE_OK);
  CHECK(semwire_sweep_add_mode(plan, "bogus") == SEMWIRE_ERR_INVALID);
  int qualities[] = {5, 50};
  REQUIRE(semwire_sweep_set_qualities(plan, qualities, 2) == SEMWIRE_OK);
  int configs[] = {0};
  REQUIRE(semwire_sweep_set_configs(plan, configs, 1) == SEMWIRE_OK);
  REQUIRE(semwire_sweep_set_seed(plan, 1) == SEMWIRE_OK);
  REQUIRE(semwire_sweep_set_reconstructor(plan, "harmonic") == SEMWIRE_OK);
  REQUIRE(semwire_sweep_set_jobs(plan, 2) == SEMWIRE_OK);
  REQUIRE(semwire_sweep_run(plan) == SEMWIRE_OK);
  semwire_sweep_plan_free(plan);

  std::string csv = dir.file("out") + "/rd.csv";
  REQUIRE(fs::exists(csv));
  REQUIRE(semwire_plot_rd(csv.c_str(), dir.file("out").c_str()) == SEMWIRE_OK);
  CHECK(fs::exists(dir.file("out") + "/rd_psnr.svg"));
  CHECK(fs::exists(dir.file("out") + "/rd_msssim.svg"));
  CHECK(fs::exists(dir.file("out") + "/rd_bytes.svg"));

  // cleanup
  semwire_container_free(container);
  semwire_image_free(img);
  semwire_image_free(edges);
  semwire_image_free(masked);
  semwire_image_free(mask_img);
  semwire_image_free(decoded);
  semwire_mask_free(mask);
  semwire_mask_free(rmask);
  semwire_config_free(config);
  semwire_segmap_free(seg);
  semwire_taxonomy_free(tax);
}

TEST_CASE("decode errors map to codec/container statuses") {
  Scratch dir("errors");
  std::string junk = dir.file("junk.smc");
  {
    std::vector<uint8_t> bytes = {'S', 'M', 'C', '2'};
    FILE* f = fopen(junk.c_str(), "wb");
    REQUIRE(f);
    fwrite(bytes.data(), 1, bytes.size(), f);
    fclose(f);
  }
  CHECK(semwire_samr_decode(junk.c_str(), "harmonic",
                            dir.file("out.png").c_str()) ==
        SEMWIRE_ERR_CONTAINER);

  semwire_container* c = nullptr;
  CHECK(semwire_container_open(junk.c_str(), &c) == SEMWIRE_ERR_CONTAINER);
}

TEST_CASE("pixel round trip through from_pixels") {
  std::vector<uint8_t> pixels(24 * 16 * 3);
  for (size_t i = 0; i < pixels.size(); ++i)
    pixels[i] = uint8_t((i * 7) % 256);
  semwire_image* img = nullptr;
  REQUIRE(semwire_image_from_pixels(24, 16, 3, pixels.data(), &img) ==
          SEMWIRE_OK);
  CHECK(std::memcmp(semwire_image_data(img), pixels.data(), pixels.size()) ==
        0);
  CHECK(semwire_image_from_pixels(24, 16, 4, pixels.data(), &img) ==
        SEMWIRE_ERR_INVALID);
  semwire_image_free(img);
}
