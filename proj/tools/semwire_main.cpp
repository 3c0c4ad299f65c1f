// semwire command-line front-end. Talks to the core exclusively through
// the public C API in semwire/semwire.h.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semwire/semwire.h"

namespace {

[[noreturn]] void fail(semwire_status status, const std::string& what) {
  std::fprintf(stderr, "semwire: %s failed (%s): %s\n", what.c_str(),
               semwire_status_name(status), semwire_last_error());
  std::exit(1);
}

void check(semwire_status status, const std::string& what) {
  if (status != SEMWIRE_OK) fail(status, what);
}

struct ImageHandle {
  semwire_image* ptr = nullptr;
  ~ImageHandle() { semwire_image_free(ptr); }
};

struct TaxonomyHandle {
  semwire_taxonomy* ptr = nullptr;
  ~TaxonomyHandle() { semwire_taxonomy_free(ptr); }
};

struct SegmapHandle {
  semwire_segmap* ptr = nullptr;
  ~SegmapHandle() { semwire_segmap_free(ptr); }
};

struct ConfigHandle {
  semwire_mask_config* ptr = nullptr;
  ~ConfigHandle() { semwire_config_free(ptr); }
};

struct MaskHandle {
  semwire_mask* ptr = nullptr;
  ~MaskHandle() { semwire_mask_free(ptr); }
};

void load_taxonomy(const std::string& path, TaxonomyHandle& tax) {
  if (path.empty())
    check(semwire_taxonomy_default(&tax.ptr), "loading default taxonomy");
  else
    check(semwire_taxonomy_load(path.c_str(), &tax.ptr), "loading taxonomy");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "semwire: cannot open %s\n", path.c_str());
    std::exit(1);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
    text.pop_back();
  return text;
}

std::string replace_all(std::string s, const std::string& key,
                        const std::string& value) {
  size_t pos = 0;
  while ((pos = s.find(key, pos)) != std::string::npos) {
    s.replace(pos, key.size(), value);
    pos += value.size();
  }
  return s;
}

// Resolve the caption: explicit file, external command, or the
// <image-stem>.caption.txt sidecar.
std::string resolve_caption(const std::string& image_path,
                            const std::string& caption_file,
                            const std::string& caption_cmd) {
  if (!caption_file.empty()) return read_text_file(caption_file);
  if (!caption_cmd.empty()) {
    std::filesystem::path out =
        std::filesystem::temp_directory_path() / "semwire_caption.txt";
    std::string cmd = replace_all(caption_cmd, "{img}", image_path);
    cmd = replace_all(cmd, "{out}", out.string());
    if (std::system(cmd.c_str()) != 0) {
      std::fprintf(stderr, "semwire: caption command failed: %s\n",
                   cmd.c_str());
      std::exit(1);
    }
    return read_text_file(out.string());
  }
  std::filesystem::path p(image_path);
  std::filesystem::path sidecar = p.parent_path() / (p.stem().string() +
                                                     ".caption.txt");
  if (std::filesystem::exists(sidecar)) return read_text_file(sidecar.string());
  std::fprintf(stderr,
               "semwire: no caption found; pass --caption, --caption-cmd or "
               "provide %s\n",
               sidecar.string().c_str());
  std::exit(1);
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> values;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    try {
      values.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      std::fprintf(stderr, "semwire: bad %s value '%s'\n", what, tok.c_str());
      std::exit(1);
    }
  }
  if (values.empty()) {
    std::fprintf(stderr, "semwire: empty %s list\n", what);
    std::exit(1);
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semwire - semantic image compression toolkit"};
  app.require_subcommand(1);

  // ---- edges ----
  std::string e_in, e_out;
  double e_low = 100.0, e_high = 200.0;
  auto* edges = app.add_subcommand("edges", "Extract a Canny edge map");
  edges->add_option("input", e_in, "input PNG or JPEG")->required();
  edges->add_option("--low", e_low, "low hysteresis threshold");
  edges->add_option("--high", e_high, "high hysteresis threshold");
  edges->add_option("-o,--output", e_out, "output .png or .webp")->required();

  // ---- mask ----
  std::string m_segmap, m_out, m_config_file, m_taxonomy;
  int m_config = 0;
  uint64_t m_seed = 0;
  double m_random = -1.0;
  auto* mask_cmd = app.add_subcommand("mask", "Compute a patch mask");
  mask_cmd->add_option("--segmap", m_segmap, "label PNG")->required();
  mask_cmd->add_option("--config", m_config, "preset config id (0-7)");
  mask_cmd->add_option("--config-file", m_config_file,
                       "group:probability file overriding --config");
  mask_cmd->add_option("--random", m_random,
                       "semantic-agnostic mask with this ratio instead");
  mask_cmd->add_option("--seed", m_seed, "RNG seed");
  mask_cmd->add_option("--taxonomy", m_taxonomy, "taxonomy file");
  mask_cmd->add_option("-o,--output", m_out, "grid-resolution mask PNG")
      ->required();

  // ---- mmsd-pack ----
  std::string mp_img, mp_segmap, mp_caption, mp_caption_cmd, mp_out,
      mp_taxonomy;
  int mp_seg_w = 1024, mp_seg_h = 512;
  double mp_low = 100.0, mp_high = 200.0;
  auto* mmsd_pack =
      app.add_subcommand("mmsd-pack", "Pack segmentation/edges/caption");
  mmsd_pack->add_option("image", mp_img, "input image")->required();
  mmsd_pack->add_option("--segmap", mp_segmap, "label PNG")->required();
  mmsd_pack->add_option("--caption", mp_caption, "caption text file");
  mmsd_pack->add_option("--caption-cmd", mp_caption_cmd,
                        "external caption command ({img} {out})");
  mmsd_pack->add_option("--taxonomy", mp_taxonomy, "taxonomy file");
  mmsd_pack->add_option("--seg-width", mp_seg_w, "segmap downsample width");
  mmsd_pack->add_option("--seg-height", mp_seg_h, "segmap downsample height");
  mmsd_pack->add_option("--low", mp_low, "Canny low threshold");
  mmsd_pack->add_option("--high", mp_high, "Canny high threshold");
  mmsd_pack->add_option("-o,--output", mp_out, "output .smc container")
      ->required();

  // ---- mmsd-unpack ----
  std::string mu_in, mu_dir, mu_taxonomy, mu_cmd, mu_out;
  auto* mmsd_unpack =
      app.add_subcommand("mmsd-unpack", "Unpack an MMSD container");
  mmsd_unpack->add_option("container", mu_in, "input .smc")->required();
  mmsd_unpack->add_option("-d,--dir", mu_dir, "output directory")->required();
  mmsd_unpack->add_option("--taxonomy", mu_taxonomy, "taxonomy file");
  mmsd_unpack->add_option("--reconstruct-cmd", mu_cmd,
                          "external decoder ({seg} {edge} {caption} {out})");
  mmsd_unpack->add_option("-o,--output", mu_out,
                          "reconstructed PNG (with --reconstruct-cmd)");

  // ---- ratio ----
  std::string r_orig, r_smc;
  auto* ratio_cmd =
      app.add_subcommand("ratio", "Original/payload compression ratio");
  ratio_cmd->add_option("original", r_orig, "original image file")->required();
  ratio_cmd->add_option("container", r_smc, "payload .smc")->required();

  // ---- samr-encode ----
  std::string se_img, se_segmap, se_out, se_config_file, se_taxonomy;
  int se_config = 0, se_quality = 50;
  uint64_t se_seed = 0;
  bool se_side_channel = false;
  auto* samr_encode =
      app.add_subcommand("samr-encode", "Mask and JPEG-encode an image");
  samr_encode->add_option("image", se_img, "input image")->required();
  samr_encode->add_option("--segmap", se_segmap, "label PNG")->required();
  samr_encode->add_option("--config", se_config, "preset config id (0-7)");
  samr_encode->add_option("--config-file", se_config_file,
                          "group:probability file overriding --config");
  samr_encode->add_option("-q,--quality", se_quality, "JPEG quality factor");
  samr_encode->add_option("--seed", se_seed, "RNG seed");
  samr_encode->add_option("--taxonomy", se_taxonomy, "taxonomy file");
  samr_encode->add_flag("--mask-side-channel", se_side_channel,
                        "include the exact RLE mask in the payload");
  samr_encode->add_option("-o,--output", se_out, "output .smc")->required();

  // ---- samr-decode ----
  std::string sd_in, sd_out, sd_rec = "harmonic";
  auto* samr_decode =
      app.add_subcommand("samr-decode", "Decode and inpaint a SAMR payload");
  samr_decode->add_option("container", sd_in, "input .smc")->required();
  samr_decode->add_option("--reconstructor", sd_rec,
                          "'harmonic' or 'ext:<cmd {in} {mask} {out}>'");
  samr_decode->add_option("-o,--output", sd_out, "output PNG")->required();

  // ---- rd-sweep ----
  std::string rs_corpus, rs_out, rs_modes = "jpeg,samr", rs_rec = "harmonic";
  std::string rs_configs = "0,2,4,7";
  std::string rs_qualities = "1,3,5,10,20,30,40,50,60,70,80,90,95,98,100";
  uint64_t rs_seed = 0;
  int rs_jobs = 0;
  bool rs_plot = false;
  auto* rd_sweep =
      app.add_subcommand("rd-sweep", "Rate-distortion sweep over a corpus");
  rd_sweep->add_option("--corpus", rs_corpus, "corpus directory")->required();
  rd_sweep->add_option("--modes", rs_modes, "comma list: jpeg,samr,mmsd");
  rd_sweep->add_option("--configs", rs_configs, "comma list of config ids");
  rd_sweep->add_option("--qualities", rs_qualities, "comma list of Q values");
  rd_sweep->add_option("--seed", rs_seed, "RNG seed");
  rd_sweep->add_option("--reconstructor", rs_rec, "harmonic or ext:<cmd>");
  rd_sweep->add_option("--jobs", rs_jobs, "worker count (or SEMWIRE_JOBS)");
  rd_sweep->add_flag("--plot", rs_plot, "render SVG charts after the sweep");
  rd_sweep->add_option("-o,--output", rs_out, "output directory")->required();

  // ---- plot-rd ----
  std::string pr_csv, pr_out;
  auto* plot_rd = app.add_subcommand("plot-rd", "Render charts from rd.csv");
  plot_rd->add_option("csv", pr_csv, "rd.csv from a sweep")->required();
  plot_rd->add_option("-o,--output", pr_out, "output directory")->required();

  // ---- gen-corpus ----
  std::string gc_dir;
  int gc_count = 5, gc_width = 2048, gc_height = 1024;
  uint64_t gc_seed = 1;
  auto* gen_corpus =
      app.add_subcommand("gen-corpus", "Generate a synthetic test corpus");
  gen_corpus->add_option("dir", gc_dir, "output directory")->required();
  gen_corpus->add_option("--count", gc_count, "number of scenes");
  gen_corpus->add_option("--width", gc_width, "scene width");
  gen_corpus->add_option("--height", gc_height, "scene height");
  gen_corpus->add_option("--seed", gc_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  if (*edges) {
    ImageHandle img, edge;
    check(semwire_image_load(e_in.c_str(), &img.ptr), "loading image");
    check(semwire_canny(img.ptr, e_low, e_high, &edge.ptr), "edge detection");
    std::string ext = std::filesystem::path(e_out).extension().string();
    if (ext == ".webp")
      check(semwire_image_save_webp(edge.ptr, e_out.c_str()), "saving webp");
    else
      check(semwire_image_save_png(edge.ptr, e_out.c_str()), "saving png");
    std::printf("wrote %s\n", e_out.c_str());
  } else if (*mask_cmd) {
    TaxonomyHandle tax;
    load_taxonomy(m_taxonomy, tax);
    SegmapHandle seg;
    check(semwire_segmap_load(m_segmap.c_str(), tax.ptr, &seg.ptr),
          "loading segmap");
    int w = semwire_segmap_width(seg.ptr);
    int h = semwire_segmap_height(seg.ptr);
    MaskHandle mask;
    if (m_random >= 0.0) {
      check(semwire_random_mask(w, h, m_random, m_seed, &mask.ptr),
            "random mask");
    } else {
      ConfigHandle config;
      if (!m_config_file.empty())
        check(semwire_config_load(m_config_file.c_str(), &config.ptr),
              "loading config");
      else
        check(semwire_config_preset(m_config, &config.ptr), "config preset");
      check(semwire_semantic_mask(seg.ptr, config.ptr, w, h, m_seed,
                                  &mask.ptr),
            "semantic mask");
    }
    ImageHandle img;
    check(semwire_mask_to_image(mask.ptr, &img.ptr), "rendering mask");
    check(semwire_image_save_png(img.ptr, m_out.c_str()), "saving mask");
    std::printf("mask %dx%d, %zu of %d patches masked -> %s\n",
                semwire_mask_cols(mask.ptr), semwire_mask_rows(mask.ptr),
                semwire_mask_count(mask.ptr),
                semwire_mask_rows(mask.ptr) * semwire_mask_cols(mask.ptr),
                m_out.c_str());
  } else if (*mmsd_pack) {
    ImageHandle img;
    check(semwire_image_load(mp_img.c_str(), &img.ptr), "loading image");
    TaxonomyHandle tax;
    load_taxonomy(mp_taxonomy, tax);
    SegmapHandle seg;
    check(semwire_segmap_load(mp_segmap.c_str(), tax.ptr, &seg.ptr),
          "loading segmap");
    std::string caption = resolve_caption(mp_img, mp_caption, mp_caption_cmd);
    semwire_mmsd_options opts;
    semwire_mmsd_options_init(&opts);
    opts.seg_target_w = mp_seg_w;
    opts.seg_target_h = mp_seg_h;
    opts.canny_low = mp_low;
    opts.canny_high = mp_high;
    check(semwire_mmsd_pack(img.ptr, seg.ptr, caption.c_str(), &opts,
                            mp_out.c_str()),
          "packing");
    double ratio = 0.0;
    check(semwire_compression_ratio(mp_img.c_str(), mp_out.c_str(), &ratio),
          "computing ratio");
    std::printf("wrote %s (%ju bytes, ratio %.2fx)\n", mp_out.c_str(),
                static_cast<uintmax_t>(std::filesystem::file_size(mp_out)),
                ratio);
  } else if (*mmsd_unpack) {
    TaxonomyHandle tax;
    load_taxonomy(mu_taxonomy, tax);
    check(semwire_mmsd_unpack(mu_in.c_str(), tax.ptr, mu_dir.c_str()),
          "unpacking");
    std::printf("unpacked %s into %s\n", mu_in.c_str(), mu_dir.c_str());
    if (!mu_cmd.empty()) {
      if (mu_out.empty()) {
        std::fprintf(stderr, "semwire: --reconstruct-cmd requires -o\n");
        return 1;
      }
      check(semwire_mmsd_reconstruct(mu_in.c_str(), tax.ptr, mu_cmd.c_str(),
                                     mu_dir.c_str(), mu_out.c_str()),
            "reconstructing");
      std::printf("reconstructed -> %s\n", mu_out.c_str());
    }
  } else if (*ratio_cmd) {
    double ratio = 0.0;
    check(semwire_compression_ratio(r_orig.c_str(), r_smc.c_str(), &ratio),
          "computing ratio");
    std::printf("%.4f\n", ratio);
  } else if (*samr_encode) {
    ImageHandle img;
    check(semwire_image_load(se_img.c_str(), &img.ptr), "loading image");
    TaxonomyHandle tax;
    load_taxonomy(se_taxonomy, tax);
    SegmapHandle seg;
    check(semwire_segmap_load(se_segmap.c_str(), tax.ptr, &seg.ptr),
          "loading segmap");
    ConfigHandle config;
    if (!se_config_file.empty())
      check(semwire_config_load(se_config_file.c_str(), &config.ptr),
            "loading config");
    else
      check(semwire_config_preset(se_config, &config.ptr), "config preset");
    check(semwire_samr_encode(img.ptr, seg.ptr, config.ptr, se_quality,
                              se_seed, se_side_channel ? 1 : 0,
                              se_out.c_str()),
          "encoding");
    std::printf("wrote %s (%ju bytes)\n", se_out.c_str(),
                static_cast<uintmax_t>(std::filesystem::file_size(se_out)));
  } else if (*samr_decode) {
    check(semwire_samr_decode(sd_in.c_str(), sd_rec.c_str(), sd_out.c_str()),
          "decoding");
    std::printf("wrote %s\n", sd_out.c_str());
  } else if (*rd_sweep) {
    semwire_sweep_plan* plan = nullptr;
    check(semwire_sweep_plan_new(&plan), "creating plan");
    check(semwire_sweep_set_corpus(plan, rs_corpus.c_str()), "plan corpus");
    check(semwire_sweep_set_output(plan, rs_out.c_str()), "plan output");
    {
      std::istringstream in(rs_modes);
      std::string mode;
      while (std::getline(in, mode, ','))
        if (!mode.empty())
          check(semwire_sweep_add_mode(plan, mode.c_str()), "plan mode");
    }
    std::vector<int> qualities = parse_int_list(rs_qualities, "quality");
    check(semwire_sweep_set_qualities(plan, qualities.data(), qualities.size()),
          "plan qualities");
    std::vector<int> configs = parse_int_list(rs_configs, "config");
    check(semwire_sweep_set_configs(plan, configs.data(), configs.size()),
          "plan configs");
    check(semwire_sweep_set_seed(plan, rs_seed), "plan seed");
    check(semwire_sweep_set_reconstructor(plan, rs_rec.c_str()),
          "plan reconstructor");
    check(semwire_sweep_set_jobs(plan, rs_jobs), "plan jobs");
    semwire_status status = semwire_sweep_run(plan);
    semwire_sweep_plan_free(plan);
    if (status != SEMWIRE_OK) fail(status, "sweep");
    std::string csv = rs_out + "/rd.csv";
    std::printf("sweep complete -> %s\n", csv.c_str());
    if (rs_plot) {
      check(semwire_plot_rd(csv.c_str(), rs_out.c_str()), "plotting");
      std::printf("charts -> %s\n", rs_out.c_str());
    }
  } else if (*plot_rd) {
    check(semwire_plot_rd(pr_csv.c_str(), pr_out.c_str()), "plotting");
    std::printf("charts -> %s\n", pr_out.c_str());
  } else if (*gen_corpus) {
    check(semwire_synth_corpus(gc_dir.c_str(), gc_count, gc_width, gc_height,
                               gc_seed),
          "generating corpus");
    std::printf("generated %d scenes in %s\n", gc_count, gc_dir.c_str());
  }
  return 0;
}
