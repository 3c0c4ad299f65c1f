#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "metrics.hpp"

namespace semwire {

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 78;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 58;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf",
                          "#bcbd22", "#7f7f7f"};

struct Point {
  double x;
  double y;
};

struct Series {
  std::string label;
  std::vector<Point> points;
};

std::string series_key(const RdRecord& r) {
  if (r.config >= 0) return r.mode + " config " + std::to_string(r.config);
  return r.mode;
}

// Mean point per (series, Q) so one curve summarizes the corpus.
std::vector<Series> build_series(const std::vector<RdRecord>& records,
                                 double RdRecord::* metric,
                                 bool quality_metric) {
  std::map<std::string, std::map<int, std::pair<Point, int>>> acc;
  for (const auto& r : records) {
    double y = r.*metric;
    if (quality_metric && (std::isnan(y) || std::isinf(y))) continue;
    auto& slot = acc[series_key(r)][r.quality];
    slot.first.x += r.bpp;
    slot.first.y += y;
    slot.second += 1;
  }
  std::vector<Series> series;
  for (auto& [label, by_q] : acc) {
    Series s;
    s.label = label;
    for (auto& [q, slot] : by_q)
      s.points.push_back({slot.first.x / slot.second,
                          slot.first.y / slot.second});
    std::sort(s.points.begin(), s.points.end(),
              [](const Point& a, const Point& b) { return a.x < b.x; });
    if (!s.points.empty()) series.push_back(std::move(s));
  }
  return series;
}

struct Range {
  double lo;
  double hi;
};

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

void render_chart(const std::filesystem::path& path,
                  const std::vector<Series>& series, const std::string& title,
                  const std::string& y_label) {
  Range xr{1e9, -1e9}, yr{1e9, -1e9};
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if (p.x > 0) {
        xr.lo = std::min(xr.lo, p.x);
        xr.hi = std::max(xr.hi, p.x);
      }
      yr.lo = std::min(yr.lo, p.y);
      yr.hi = std::max(yr.hi, p.y);
    }
  }
  if (xr.lo > xr.hi) xr = {0.01, 1.0};
  if (yr.lo > yr.hi) yr = {0.0, 1.0};
  // Pad degenerate ranges so a single point still renders.
  if (xr.hi / xr.lo < 1.2) {
    xr.lo /= 1.5;
    xr.hi *= 1.5;
  }
  if (yr.hi - yr.lo < 1e-12) {
    yr.lo -= 0.5;
    yr.hi += 0.5;
  } else {
    double pad = (yr.hi - yr.lo) * 0.06;
    yr.lo -= pad;
    yr.hi += pad;
  }

  const double lx0 = std::log10(xr.lo), lx1 = std::log10(xr.hi);
  auto sx = [&](double x) {
    return kMarginLeft + (std::log10(x) - lx0) / (lx1 - lx0) *
                             (kWidth - kMarginLeft - kMarginRight);
  };
  auto sy = [&](double y) {
    return kHeight - kMarginBottom -
           (y - yr.lo) / (yr.hi - yr.lo) *
               (kHeight - kMarginTop - kMarginBottom);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title
      << "</text>\n";

  // log-x grid: decades plus 2x and 5x minors
  for (int e = static_cast<int>(std::floor(lx0)) - 1;
       e <= static_cast<int>(std::ceil(lx1)); ++e) {
    for (double m : {1.0, 2.0, 5.0}) {
      double x = m * std::pow(10.0, e);
      if (x < xr.lo * 0.999 || x > xr.hi * 1.001) continue;
      double px = sx(x);
      bool major = m == 1.0;
      svg << "<line x1=\"" << px << "\" y1=\"" << kMarginTop << "\" x2=\""
          << px << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\""
          << (major ? "#cccccc" : "#eeeeee") << "\"/>\n";
      svg << "<text x=\"" << px << "\" y=\"" << kHeight - kMarginBottom + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">"
          << fmt(x) << "</text>\n";
    }
  }
  // y grid: ~6 ticks
  double step = (yr.hi - yr.lo) / 6.0;
  double mag = std::pow(10.0, std::floor(std::log10(step)));
  step = std::ceil(step / mag) * mag;
  for (double y = std::ceil(yr.lo / step) * step; y <= yr.hi; y += step) {
    double py = sy(y);
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << py
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(std::round(y * 1e6) / 1e6) << "</text>\n";
  }

  // axes
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << kWidth - kMarginLeft - kMarginRight << "\" height=\""
      << kHeight - kMarginTop - kMarginBottom
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\""
      << kHeight - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">BPP (log scale)</text>\n";
  svg << "<text x=\"20\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 "
      << kHeight / 2 << ")\">" << y_label << "</text>\n";

  // series
  for (size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(*kPalette))];
    if (s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\" points=\"";
      for (const auto& p : s.points) svg << sx(p.x) << "," << sy(p.y) << " ";
      svg << "\"/>\n";
    }
    for (const auto& p : s.points)
      svg << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
          << "\" r=\"3.2\" fill=\"" << color << "\"/>\n";
  }

  // legend
  double ly = kMarginTop + 10;
  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(*kPalette))];
    double lx = kWidth - kMarginRight - 180;
    svg << "<rect class=\"legend-entry\" x=\"" << lx << "\" y=\"" << ly - 9
        << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << lx + 20 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label
        << "</text>\n";
    ly += 18;
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open for write: " + path.string());
  out << svg.str();
}

}  // namespace

std::vector<std::filesystem::path> plot_rd(
    const std::filesystem::path& csv_path,
    const std::filesystem::path& output_dir) {
  std::vector<RdRecord> records = read_rd_csv(csv_path);
  std::filesystem::create_directories(output_dir);

  struct Chart {
    const char* file;
    const char* title;
    const char* y_label;
    double RdRecord::* metric;
    bool quality_metric;
  };
  const Chart charts[] = {
      {"rd_psnr.svg", "Rate-distortion: PSNR", "PSNR (dB)", &RdRecord::psnr_db,
       true},
      {"rd_msssim.svg", "Rate-distortion: MS-SSIM", "MS-SSIM",
       &RdRecord::ms_ssim, true},
      {"rd_bytes.svg", "Payload size", "bytes", nullptr, false},
  };

  std::vector<std::filesystem::path> written;
  for (const auto& chart : charts) {
    std::vector<Series> series;
    if (chart.metric) {
      series = build_series(records, chart.metric, chart.quality_metric);
    } else {
      // bytes live in a uint64 field; adapt through a temporary copy
      std::vector<RdRecord> copy = records;
      for (auto& r : copy) r.psnr_db = static_cast<double>(r.bytes);
      series = build_series(copy, &RdRecord::psnr_db, false);
    }
    auto path = output_dir / chart.file;
    render_chart(path, series, chart.title, chart.y_label);
    written.push_back(path);
  }
  return written;
}

}  // namespace semwire
