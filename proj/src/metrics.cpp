#include "metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "canny.hpp"
#include "error.hpp"

namespace semwire {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kC1 = (kK1 * 255.0) * (kK1 * 255.0);
constexpr double kC2 = (kK2 * 255.0) * (kK2 * 255.0);
constexpr int kMsScales = 5;
// Canonical scale weights; normalized to sum 1 at use.
constexpr double kMsWeights[kMsScales] = {0.0448, 0.2856, 0.3001, 0.2363,
                                          0.1333};

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  double at(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }
};

Plane to_luma_plane(const ImageBuffer& img) {
  ImageBuffer gray = img.channels == 1 ? img : to_grayscale(img);
  Plane p;
  p.w = gray.width;
  p.h = gray.height;
  p.v.assign(gray.data.begin(), gray.data.end());
  return p;
}

std::vector<double> gaussian_window() {
  std::vector<double> win(static_cast<size_t>(kWindow) * kWindow);
  const int r = kWindow / 2;
  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      double g = std::exp(-(dx * dx + dy * dy) /
                          (2.0 * kWindowSigma * kWindowSigma));
      win[static_cast<size_t>(dy + r) * kWindow + (dx + r)] = g;
      sum += g;
    }
  }
  for (double& g : win) g /= sum;
  return win;
}

struct SsimSums {
  double mean_cs = 0.0;
  double mean_ssim = 0.0;
};

// Gaussian-weighted local statistics over valid window positions.
SsimSums ssim_pass(const Plane& a, const Plane& b) {
  static const std::vector<double> win = gaussian_window();
  const int r = kWindow / 2;
  if (a.w < kWindow || a.h < kWindow)
    raise(ErrorCode::Dimension, "image smaller than the 11x11 SSIM window");

  double cs_acc = 0.0, ssim_acc = 0.0;
  size_t count = 0;
  for (int y = r; y < a.h - r; ++y) {
    for (int x = r; x < a.w - r; ++x) {
      double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
      const double* wp = win.data();
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx, ++wp) {
          double pa = a.at(x + dx, y + dy);
          double pb = b.at(x + dx, y + dy);
          mu_a += *wp * pa;
          mu_b += *wp * pb;
          aa += *wp * pa * pa;
          bb += *wp * pb * pb;
          ab += *wp * pa * pb;
        }
      }
      double var_a = aa - mu_a * mu_a;
      double var_b = bb - mu_b * mu_b;
      double cov = ab - mu_a * mu_b;
      double cs = (2.0 * cov + kC2) / (var_a + var_b + kC2);
      double lum = (2.0 * mu_a * mu_b + kC1) / (mu_a * mu_a + mu_b * mu_b + kC1);
      cs_acc += cs;
      ssim_acc += lum * cs;
      ++count;
    }
  }
  return {cs_acc / count, ssim_acc / count};
}

Plane downsample2(const Plane& p) {
  Plane out;
  out.w = p.w / 2;
  out.h = p.h / 2;
  out.v.resize(static_cast<size_t>(out.w) * out.h);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      out.v[static_cast<size_t>(y) * out.w + x] =
          0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) +
                  p.at(2 * x, 2 * y + 1) + p.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& line) {
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    raise(ErrorCode::Csv, "bad numeric field '" + field + "' in: " + line);
  return v;
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b))
    raise(ErrorCode::Dimension, "psnr requires images of identical shape");
  double sq = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = static_cast<double>(a.data[i]) - b.data[i];
    sq += d * d;
  }
  double mse = sq / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim_single_scale(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b))
    raise(ErrorCode::Dimension, "ssim requires images of identical shape");
  return ssim_pass(to_luma_plane(a), to_luma_plane(b)).mean_ssim;
}

MsSsimResult ms_ssim_detailed(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b))
    raise(ErrorCode::Dimension, "ms-ssim requires images of identical shape");

  // Coarsest scale must still fit the window: need min dim >= 11 * 2^(M-1).
  int min_dim = std::min(a.width, a.height);
  int scales = 0;
  while (scales < kMsScales && (min_dim >> scales) >= kWindow) ++scales;
  if (scales == 0)
    raise(ErrorCode::Dimension, "image smaller than the 11x11 SSIM window");

  double weight_sum = 0.0;
  for (int j = 0; j < scales; ++j) weight_sum += kMsWeights[j];

  Plane pa = to_luma_plane(a);
  Plane pb = to_luma_plane(b);
  double value = 1.0;
  for (int j = 0; j < scales; ++j) {
    SsimSums sums = ssim_pass(pa, pb);
    double w = kMsWeights[j] / weight_sum;
    // Rare negative means under heavy distortion would make pow undefined.
    double term = (j == scales - 1) ? sums.mean_ssim : sums.mean_cs;
    term = std::max(term, 0.0);
    value *= std::pow(term, w);
    if (j + 1 < scales) {
      pa = downsample2(pa);
      pb = downsample2(pb);
    }
  }

  MsSsimResult result;
  result.value = value;
  result.scales_used = scales;
  result.reduced = scales < kMsScales;
  return result;
}

double ms_ssim(const ImageBuffer& a, const ImageBuffer& b) {
  return ms_ssim_detailed(a, b).value;
}

double bpp(size_t payload_bytes, int width, int height) {
  if (width <= 0 || height <= 0)
    raise(ErrorCode::InvalidArgument, "bpp requires positive dimensions");
  return static_cast<double>(payload_bytes) * 8.0 /
         (static_cast<double>(width) * height);
}

bool RdRecord::operator<(const RdRecord& other) const {
  return std::tie(image, mode, config, quality) <
         std::tie(other.image, other.mode, other.config, other.quality);
}

bool RdRecord::operator==(const RdRecord& other) const {
  auto eq = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  return image == other.image && mode == other.mode && config == other.config &&
         quality == other.quality && bytes == other.bytes &&
         eq(bpp, other.bpp) && eq(psnr_db, other.psnr_db) &&
         eq(ms_ssim, other.ms_ssim);
}

std::string rd_csv_header() {
  return "image,mode,config,Q,bytes,bpp,psnr_db,ms_ssim";
}

std::string rd_csv_line(const RdRecord& r) {
  std::ostringstream out;
  out << r.image << ',' << r.mode << ',';
  if (r.config >= 0) out << r.config;
  out << ',' << r.quality << ',' << r.bytes << ',' << format_double(r.bpp)
      << ',' << format_double(r.psnr_db) << ',' << format_double(r.ms_ssim);
  return out.str();
}

RdRecord rd_csv_parse_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  if (fields.size() != 8)
    raise(ErrorCode::Csv, "expected 8 CSV fields, got " +
                              std::to_string(fields.size()) + " in: " + line);
  RdRecord r;
  r.image = fields[0];
  r.mode = fields[1];
  r.config = fields[2].empty() ? -1 : std::stoi(fields[2]);
  r.quality = std::stoi(fields[3]);
  r.bytes = std::stoull(fields[4]);
  r.bpp = parse_double(fields[5], line);
  r.psnr_db = parse_double(fields[6], line);
  r.ms_ssim = parse_double(fields[7], line);
  return r;
}

void write_rd_csv(const std::filesystem::path& path,
                  const std::vector<RdRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open for write: " + path.string());
  out << rd_csv_header() << '\n';
  for (const auto& r : records) out << rd_csv_line(r) << '\n';
  if (!out) raise(ErrorCode::Io, "write failed: " + path.string());
}

std::vector<RdRecord> read_rd_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != rd_csv_header())
    raise(ErrorCode::Csv, "missing or wrong CSV header in " + path.string());
  std::vector<RdRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(rd_csv_parse_line(line));
  }
  return records;
}

}  // namespace semwire
