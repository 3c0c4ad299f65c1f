#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "mmsd.hpp"
#include "samr.hpp"

namespace semwire {

enum class SweepMode { JpegOnly, Samr, MmsdPayload };

const char* sweep_mode_name(SweepMode mode);

// The paper-style 15-level quality ladder.
std::vector<int> default_quality_levels();

struct SweepPlan {
  std::filesystem::path corpus_dir;
  std::filesystem::path output_dir;
  std::vector<SweepMode> modes = {SweepMode::JpegOnly, SweepMode::Samr};
  std::vector<int> qualities = default_quality_levels();
  std::vector<int> configs = {0, 2, 4, 7};
  uint64_t seed = 0;
  Reconstructor reconstructor = Reconstructor::harmonic();
  MmsdOptions mmsd;
  int jobs = 0;  // 0: SEMWIRE_JOBS env or hardware concurrency
  bool mask_side_channel = false;

  void validate() const;
};

// One image with its sidecars: <stem>.labels.png and <stem>.caption.txt.
struct CorpusItem {
  std::string stem;
  std::filesystem::path image;
  std::filesystem::path labels;   // empty when absent
  std::filesystem::path caption;  // empty when absent
};

std::vector<CorpusItem> scan_corpus(const std::filesystem::path& dir);

// Per-image MMSD payload accounting row.
struct PayloadRecord {
  std::string image;
  uint64_t original_bytes = 0;
  uint64_t payload_bytes = 0;
  double ratio = 0.0;
};

std::string payload_csv_header();
void write_payload_csv(const std::filesystem::path& path,
                       const std::vector<PayloadRecord>& records);
std::vector<PayloadRecord> read_payload_csv(const std::filesystem::path& path);

struct SweepResult {
  std::vector<RdRecord> records;
  std::vector<PayloadRecord> payloads;
  size_t computed = 0;  // records produced this run (not resumed)
  size_t failed_images = 0;
  std::filesystem::path rd_csv;
  std::filesystem::path payload_csv;  // empty unless mmsd mode ran
};

// Runs every (image x operating point) task, resuming from an existing
// CSV when present. Per-image failures are logged and skipped; more than
// 10% failures raises. Output record order is deterministic (sorted by
// key) regardless of worker scheduling.
SweepResult run_sweep(const SweepPlan& plan);

}  // namespace semwire
