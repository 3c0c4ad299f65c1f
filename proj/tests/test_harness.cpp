#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include "error.hpp"
#include "helpers.hpp"
#include "imageio.hpp"
#include "plot.hpp"
#include "sweep.hpp"
#include "synth.hpp"

using namespace semwire;
using semwire::testing::TempDir;

namespace {

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<size_t> order(v.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = double(i);
    return rank;
  };
  auto rx = ranks(xs), ry = ranks(ys);
  double n = double(xs.size());
  double mean = (n - 1) / 2.0;
  double cov = 0, vx = 0, vy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    cov += (rx[i] - mean) * (ry[i] - mean);
    vx += (rx[i] - mean) * (rx[i] - mean);
    vy += (ry[i] - mean) * (ry[i] - mean);
  }
  return cov / std::sqrt(vx * vy);
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::string slurp(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

TEST_CASE("corpus scanning pairs sidecars and sorts deterministically") {
  TempDir dir("scan");
  synth_corpus(dir.path, {3, 128, 64, 1});
  auto items = scan_corpus(dir.path);
  REQUIRE(items.size() == 3);
  CHECK(items[0].stem == "scene_000");
  CHECK(items[2].stem == "scene_002");
  for (const auto& item : items) {
    CHECK(!item.labels.empty());
    CHECK(!item.caption.empty());
  }
  CHECK_THROWS_AS(scan_corpus(dir.path / "missing"), Error);
}

TEST_CASE("plan validation rejects bad quality ladders") {
  SweepPlan plan;
  plan.qualities = {5, 5};
  CHECK_THROWS_AS(plan.validate(), Error);
  plan.qualities = {0, 5};
  CHECK_THROWS_AS(plan.validate(), Error);
  plan.qualities = {5, 101};
  CHECK_THROWS_AS(plan.validate(), Error);
  plan.qualities = {};
  CHECK_THROWS_AS(plan.validate(), Error);
  plan.qualities = {5, 10};
  plan.configs = {9};
  CHECK_THROWS_AS(plan.validate(), Error);
}

TEST_CASE("jpeg sweep emits one record per operating point") {
  TempDir dir("sweep_jpeg");
  synth_corpus(dir.path / "corpus", {2, 192, 96, 3});

  SweepPlan plan;
  plan.corpus_dir = dir.path / "corpus";
  plan.output_dir = dir.path / "out";
  plan.modes = {SweepMode::JpegOnly};
  plan.jobs = 2;
  SweepResult result = run_sweep(plan);

  CHECK(result.records.size() == 2 * 15);
  CHECK(result.computed == 2 * 15);
  CHECK(result.failed_images == 0);

  // bytes monotone in Q per image
  for (const std::string stem : {"scene_000", "scene_001"}) {
    std::vector<double> qs, sizes;
    for (const auto& r : result.records) {
      if (r.image != stem) continue;
      qs.push_back(r.quality);
      sizes.push_back(double(r.bytes));
      CHECK(r.bpp > 0.0);
      CHECK(r.psnr_db > 0.0);
      CHECK(r.ms_ssim > 0.0);
      CHECK(r.ms_ssim <= 1.0);
    }
    CHECK(spearman(qs, sizes) >= 0.95);
  }

  // records are sorted by key
  CHECK(std::is_sorted(result.records.begin(), result.records.end()));
}

TEST_CASE("sweep resumes without touching completed output") {
  TempDir dir("sweep_resume");
  synth_corpus(dir.path / "corpus", {2, 160, 80, 5});

  SweepPlan plan;
  plan.corpus_dir = dir.path / "corpus";
  plan.output_dir = dir.path / "out";
  plan.modes = {SweepMode::JpegOnly, SweepMode::Samr, SweepMode::MmsdPayload};
  plan.qualities = {5, 20};
  plan.configs = {0, 7};
  plan.seed = 9;
  SweepResult first = run_sweep(plan);
  CHECK(first.computed == 2 * 2 + 2 * 2 * 2 + 2);  // jpeg + samr + mmsd

  auto rd_bytes = read_file(first.rd_csv);
  auto payload_bytes = read_file(first.payload_csv);

  SweepResult second = run_sweep(plan);
  CHECK(second.computed == 0);
  CHECK(second.records.size() == first.records.size());
  CHECK(read_file(second.rd_csv) == rd_bytes);
  CHECK(read_file(second.payload_csv) == payload_bytes);

  // adding one quality level computes only the delta
  plan.qualities = {5, 20, 50};
  SweepResult third = run_sweep(plan);
  CHECK(third.computed == 2 + 2 * 2);  // one new Q for jpeg + samr per image
}

TEST_CASE("mmsd sweep rows carry payload accounting") {
  TempDir dir("sweep_mmsd");
  synth_corpus(dir.path / "corpus", {2, 160, 80, 7});

  SweepPlan plan;
  plan.corpus_dir = dir.path / "corpus";
  plan.output_dir = dir.path / "out";
  plan.modes = {SweepMode::MmsdPayload};
  SweepResult result = run_sweep(plan);

  REQUIRE(result.payloads.size() == 2);
  for (const auto& p : result.payloads) {
    CHECK(p.payload_bytes > 0);
    CHECK(p.ratio > 1.0);
    CHECK(p.original_bytes > p.payload_bytes);
  }
  for (const auto& r : result.records) {
    CHECK(r.mode == "mmsd");
    CHECK(std::isnan(r.psnr_db));
    CHECK(std::isnan(r.ms_ssim));
    CHECK(r.bytes > 0);
  }
  CHECK(std::filesystem::exists(result.payload_csv));
}

TEST_CASE("empty corpus raises before any work") {
  TempDir dir("sweep_empty");
  std::filesystem::create_directories(dir.path / "corpus");
  SweepPlan plan;
  plan.corpus_dir = dir.path / "corpus";
  plan.output_dir = dir.path / "out";
  CHECK_THROWS_AS(run_sweep(plan), Error);
  CHECK(!std::filesystem::exists(dir.path / "out" / "rd.csv"));
}

TEST_CASE("failing images are skipped and capped at 10%") {
  TempDir dir("sweep_fail");
  synth_corpus(dir.path / "corpus", {3, 128, 64, 11});
  // one corrupt image: 25% failure rate exceeds the cap
  write_file(dir.path / "corpus" / "broken.png",
             std::vector<uint8_t>{'n', 'o', 'p', 'e'});

  SweepPlan plan;
  plan.corpus_dir = dir.path / "corpus";
  plan.output_dir = dir.path / "out";
  plan.modes = {SweepMode::JpegOnly};
  plan.qualities = {10};
  CHECK_THROWS_AS(run_sweep(plan), Error);
  // completed work is still on disk for resumption
  CHECK(std::filesystem::exists(dir.path / "out" / "rd.csv"));
  CHECK(read_rd_csv(dir.path / "out" / "rd.csv").size() == 3);
}

TEST_CASE("samr sweep rows decode through the reconstructor") {
  TempDir dir("sweep_samr");
  synth_corpus(dir.path / "corpus", {1, 192, 96, 13});

  SweepPlan plan;
  plan.corpus_dir = dir.path / "corpus";
  plan.output_dir = dir.path / "out";
  plan.modes = {SweepMode::Samr};
  plan.qualities = {10, 50};
  plan.configs = {0};
  plan.seed = 4;
  SweepResult result = run_sweep(plan);

  REQUIRE(result.records.size() == 2);
  for (const auto& r : result.records) {
    CHECK(r.mode == "samr");
    CHECK(r.config == 0);
    CHECK(r.psnr_db > 10.0);
    CHECK(r.ms_ssim > 0.3);
  }
  // higher quality, better psnr
  CHECK(result.records[1].psnr_db > result.records[0].psnr_db);
}

TEST_CASE("plot_rd renders three charts with one legend entry per series") {
  TempDir dir("plot");
  std::vector<RdRecord> records;
  for (int q : {5, 10, 20}) {
    RdRecord jpeg{"img", "jpeg", -1, q, uint64_t(q * 100), 0.01 * q,
                  20.0 + q * 0.1, 0.8};
    RdRecord samr{"img", "samr", 0, q, uint64_t(q * 80), 0.008 * q,
                  21.0 + q * 0.1, 0.85};
    records.push_back(jpeg);
    records.push_back(samr);
  }
  auto csv = dir.path / "rd.csv";
  write_rd_csv(csv, records);

  auto written = plot_rd(csv, dir.path / "charts");
  REQUIRE(written.size() == 3);
  for (const auto& path : written) {
    CHECK(std::filesystem::exists(path));
    std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(count_occurrences(svg, "legend-entry") == 2);
    CHECK(svg.find("BPP (log scale)") != std::string::npos);
  }
}

TEST_CASE("plot_rd handles a single record without crashing") {
  TempDir dir("plot_single");
  std::vector<RdRecord> records{{"img", "jpeg", -1, 5, 1000, 0.08, 27.0, 0.86}};
  auto csv = dir.path / "rd.csv";
  write_rd_csv(csv, records);
  auto written = plot_rd(csv, dir.path / "charts");
  CHECK(written.size() == 3);
  std::string svg = slurp(written[0]);
  CHECK(svg.find("<circle") != std::string::npos);
}

TEST_CASE("plot_rd propagates csv errors") {
  TempDir dir("plot_bad");
  auto csv = dir.path / "bad.csv";
  write_file(csv, std::vector<uint8_t>{'x', '\n'});
  CHECK_THROWS_AS(plot_rd(csv, dir.path / "charts"), Error);
}
