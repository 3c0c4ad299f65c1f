#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "canny.hpp"
#include "error.hpp"
#include "imageio.hpp"

namespace semwire {

namespace {

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SEMWIRE_JOBS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

struct RecordKey {
  std::string image;
  std::string mode;
  int config;
  int quality;

  bool operator<(const RecordKey& other) const {
    return std::tie(image, mode, config, quality) <
           std::tie(other.image, other.mode, other.config, other.quality);
  }
};

RecordKey key_of(const RdRecord& r) {
  return {r.image, r.mode, r.config, r.quality};
}

Caption read_caption(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  Caption cap;
  cap.text.assign(bytes.begin(), bytes.end());
  // Trim a trailing newline an editor may have left.
  while (!cap.text.empty() &&
         (cap.text.back() == '\n' || cap.text.back() == '\r'))
    cap.text.pop_back();
  return cap;
}

}  // namespace

const char* sweep_mode_name(SweepMode mode) {
  switch (mode) {
    case SweepMode::JpegOnly: return "jpeg";
    case SweepMode::Samr: return "samr";
    case SweepMode::MmsdPayload: return "mmsd";
  }
  return "unknown";
}

std::vector<int> default_quality_levels() {
  return {1, 3, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 95, 98, 100};
}

void SweepPlan::validate() const {
  if (modes.empty()) raise(ErrorCode::InvalidArgument, "no sweep modes given");
  if (qualities.empty())
    raise(ErrorCode::InvalidArgument, "no quality levels given");
  int prev = 0;
  for (int q : qualities) {
    if (q < 1 || q > 100)
      raise(ErrorCode::InvalidArgument,
            "quality levels must lie in [1, 100], got " + std::to_string(q));
    if (q <= prev)
      raise(ErrorCode::InvalidArgument,
            "quality levels must be strictly increasing");
    prev = q;
  }
  for (int c : configs) MaskConfig::preset(c);  // throws on unknown ids
}

std::vector<CorpusItem> scan_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    raise(ErrorCode::Io, "corpus directory not found: " + dir.string());
  std::vector<CorpusItem> items;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto path = entry.path();
    std::string ext = path.extension().string();
    if (ext != ".png" && ext != ".jpg" && ext != ".jpeg") continue;
    std::string stem = path.stem().string();
    if (stem.size() > 7 && stem.ends_with(".labels")) continue;

    CorpusItem item;
    item.stem = stem;
    item.image = path;
    auto labels = dir / (stem + ".labels.png");
    if (std::filesystem::exists(labels)) item.labels = labels;
    auto caption = dir / (stem + ".caption.txt");
    if (std::filesystem::exists(caption)) item.caption = caption;
    items.push_back(std::move(item));
  }
  std::sort(items.begin(), items.end(),
            [](const CorpusItem& a, const CorpusItem& b) {
              return a.stem < b.stem;
            });
  return items;
}

std::string payload_csv_header() {
  return "image,orig_bytes,payload_bytes,ratio";
}

void write_payload_csv(const std::filesystem::path& path,
                       const std::vector<PayloadRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open for write: " + path.string());
  out << payload_csv_header() << '\n';
  for (const auto& r : records) {
    out << r.image << ',' << r.original_bytes << ',' << r.payload_bytes << ','
        << r.ratio << '\n';
  }
}

std::vector<PayloadRecord> read_payload_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != payload_csv_header())
    raise(ErrorCode::Csv, "missing or wrong CSV header in " + path.string());
  std::vector<PayloadRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    PayloadRecord r;
    std::string tok;
    if (!std::getline(fields, r.image, ',') || !std::getline(fields, tok, ','))
      raise(ErrorCode::Csv, "bad payload CSV line: " + line);
    r.original_bytes = std::stoull(tok);
    if (!std::getline(fields, tok, ','))
      raise(ErrorCode::Csv, "bad payload CSV line: " + line);
    r.payload_bytes = std::stoull(tok);
    if (!std::getline(fields, tok, ','))
      raise(ErrorCode::Csv, "bad payload CSV line: " + line);
    r.ratio = std::stod(tok);
    records.push_back(std::move(r));
  }
  return records;
}

SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  std::vector<CorpusItem> items = scan_corpus(plan.corpus_dir);
  if (items.empty())
    raise(ErrorCode::Io,
          "corpus contains no images: " + plan.corpus_dir.string());
  std::filesystem::create_directories(plan.output_dir);

  SweepResult result;
  result.rd_csv = plan.output_dir / "rd.csv";

  std::set<RecordKey> done;
  std::vector<RdRecord> existing;
  if (std::filesystem::exists(result.rd_csv)) {
    existing = read_rd_csv(result.rd_csv);
    for (const auto& r : existing) done.insert(key_of(r));
  }

  bool mmsd_mode = std::find(plan.modes.begin(), plan.modes.end(),
                             SweepMode::MmsdPayload) != plan.modes.end();
  if (mmsd_mode) result.payload_csv = plan.output_dir / "mmsd_payload.csv";

  std::mutex mu;
  std::vector<RdRecord> fresh;
  std::vector<PayloadRecord> payloads;
  std::atomic<size_t> next_item{0};
  std::atomic<size_t> failures{0};

  auto worker = [&]() {
    while (true) {
      size_t idx = next_item.fetch_add(1);
      if (idx >= items.size()) return;
      const CorpusItem& item = items[idx];
      try {
        ImageBuffer img = load_image(item.image);
        SegMap seg;
        bool have_seg = !item.labels.empty();
        if (have_seg)
          seg = load_segmap(item.labels, ClassTaxonomy::cityscapes34());

        std::vector<RdRecord> local;
        std::vector<PayloadRecord> local_payloads;
        for (SweepMode mode : plan.modes) {
          if (mode == SweepMode::JpegOnly) {
            for (int q : plan.qualities) {
              RecordKey key{item.stem, "jpeg", -1, q};
              if (done.count(key)) continue;
              EncodedBlob blob = encode(img, CodecFormat::Jpeg, q);
              ImageBuffer dec = decode(blob);
              RdRecord r;
              r.image = item.stem;
              r.mode = "jpeg";
              r.quality = q;
              r.bytes = blob.bytes.size();
              r.bpp = bpp(r.bytes, img.width, img.height);
              r.psnr_db = psnr(img, dec);
              r.ms_ssim = ms_ssim(img, dec);
              local.push_back(std::move(r));
            }
          } else if (mode == SweepMode::Samr) {
            if (!have_seg)
              raise(ErrorCode::Io, "samr mode requires " + item.stem +
                                       ".labels.png");
            for (int c : plan.configs) {
              MaskConfig config = MaskConfig::preset(c);
              for (int q : plan.qualities) {
                RecordKey key{item.stem, "samr", c, q};
                if (done.count(key)) continue;
                SamrBitstream bs = samr_encode(img, seg, config, q, plan.seed,
                                               plan.mask_side_channel);
                PayloadContainer container = bs.to_container();
                ImageBuffer rec = samr_decode(bs, plan.reconstructor);
                RdRecord r;
                r.image = item.stem;
                r.mode = "samr";
                r.config = c;
                r.quality = q;
                r.bytes = container.total_bytes();
                r.bpp = bpp(r.bytes, img.width, img.height);
                r.psnr_db = psnr(img, rec);
                r.ms_ssim = ms_ssim(img, rec);
                local.push_back(std::move(r));
              }
            }
          } else {
            if (!have_seg || item.caption.empty())
              raise(ErrorCode::Io,
                    "mmsd mode requires labels and caption for " + item.stem);
            RecordKey key{item.stem, "mmsd", -1, 0};
            if (done.count(key)) continue;
            Caption cap = read_caption(item.caption);
            PayloadContainer payload = mmsd_pack(img, seg, cap, plan.mmsd);
            RdRecord r;
            r.image = item.stem;
            r.mode = "mmsd";
            r.bytes = payload.total_bytes();
            r.bpp = bpp(r.bytes, img.width, img.height);
            r.psnr_db = std::numeric_limits<double>::quiet_NaN();
            r.ms_ssim = std::numeric_limits<double>::quiet_NaN();
            local.push_back(std::move(r));

            PayloadRecord pr;
            pr.image = item.stem;
            pr.original_bytes = std::filesystem::file_size(item.image);
            pr.payload_bytes = payload.total_bytes();
            pr.ratio = static_cast<double>(pr.original_bytes) /
                       static_cast<double>(pr.payload_bytes);
            local_payloads.push_back(std::move(pr));
          }
        }
        std::lock_guard<std::mutex> lock(mu);
        for (auto& r : local) fresh.push_back(std::move(r));
        for (auto& r : local_payloads) payloads.push_back(std::move(r));
      } catch (const std::exception& e) {
        failures.fetch_add(1);
        std::lock_guard<std::mutex> lock(mu);
        std::cerr << "[semwire] sweep failed for '" << item.stem
                  << "': " << e.what() << "\n";
      }
    }
  };

  int jobs = std::min<int>(resolve_jobs(plan.jobs),
                           static_cast<int>(items.size()));
  std::vector<std::thread> threads;
  for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  result.failed_images = failures.load();
  result.computed = fresh.size();

  std::vector<RdRecord> merged = std::move(existing);
  for (auto& r : fresh) merged.push_back(std::move(r));
  std::sort(merged.begin(), merged.end());
  result.records = std::move(merged);

  // Untouched plans leave the CSV bytes untouched.
  if (result.computed > 0 || !std::filesystem::exists(result.rd_csv))
    write_rd_csv(result.rd_csv, result.records);

  if (mmsd_mode) {
    size_t fresh_payloads = payloads.size();
    if (std::filesystem::exists(result.payload_csv)) {
      for (auto& r : read_payload_csv(result.payload_csv))
        payloads.push_back(std::move(r));
    }
    std::sort(payloads.begin(), payloads.end(),
              [](const PayloadRecord& a, const PayloadRecord& b) {
                return a.image < b.image;
              });
    payloads.erase(std::unique(payloads.begin(), payloads.end(),
                               [](const PayloadRecord& a,
                                  const PayloadRecord& b) {
                                 return a.image == b.image;
                               }),
                   payloads.end());
    result.payloads = payloads;
    if (fresh_payloads > 0 || !std::filesystem::exists(result.payload_csv))
      write_payload_csv(result.payload_csv, payloads);
  }

  if (result.failed_images * 10 > items.size())
    raise(ErrorCode::Io,
          "more than 10% of corpus images failed (" +
              std::to_string(result.failed_images) + " of " +
              std::to_string(items.size()) + ")");
  return result;
}

}  // namespace semwire
