#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "imageio.hpp"
#include "rng.hpp"

namespace semwire {

namespace {

// Cityscapes labelIds used by the generator.
constexpr uint8_t kRoad = 7;
constexpr uint8_t kSidewalk = 8;
constexpr uint8_t kBuilding = 11;
constexpr uint8_t kPole = 17;
constexpr uint8_t kTrafficSign = 20;
constexpr uint8_t kVegetation = 21;
constexpr uint8_t kTerrain = 22;
constexpr uint8_t kSky = 23;
constexpr uint8_t kPerson = 24;
constexpr uint8_t kCar = 26;
constexpr uint8_t kEgoVehicle = 1;

struct Painter {
  ImageBuffer img;
  std::vector<uint8_t> labels;
  CounterRng rng;
  uint64_t stream;
  uint64_t counter = 0;

  Painter(int w, int h, uint64_t seed, uint64_t stream)
      : img(ImageBuffer::create(w, h, 3)),
        labels(static_cast<size_t>(w) * h, 0),
        rng(seed),
        stream(stream) {}

  double u() { return rng.uniform01(stream, counter++); }
  double u(double lo, double hi) { return lo + (hi - lo) * u(); }
  int ui(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng.bounded(stream, counter++,
                                             static_cast<uint64_t>(hi - lo + 1)));
  }

  void put(int x, int y, int r, int g, int b, uint8_t label) {
    if (x < 0 || x >= img.width || y < 0 || y >= img.height) return;
    size_t p = (static_cast<size_t>(y) * img.width + x) * 3;
    img.data[p] = clamp8(r);
    img.data[p + 1] = clamp8(g);
    img.data[p + 2] = clamp8(b);
    labels[static_cast<size_t>(y) * img.width + x] = label;
  }

  void rect(int x0, int y0, int x1, int y1, int r, int g, int b,
            uint8_t label) {
    for (int y = std::max(0, y0); y < std::min(img.height, y1); ++y)
      for (int x = std::max(0, x0); x < std::min(img.width, x1); ++x)
        put(x, y, r, g, b, label);
  }

  void disc(int cx, int cy, int radius, int r, int g, int b, uint8_t label) {
    for (int y = cy - radius; y <= cy + radius; ++y)
      for (int x = cx - radius; x <= cx + radius; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius)
          put(x, y, r, g, b, label);
  }

  static uint8_t clamp8(int v) {
    return static_cast<uint8_t>(std::clamp(v, 0, 255));
  }
};

// smooth pseudo-random field in [-1, 1]
double value_noise(const CounterRng& rng, uint64_t stream, double x, double y,
                   double cell) {
  auto lattice = [&](int64_t ix, int64_t iy) {
    uint64_t hash = rng.bits(stream, static_cast<uint64_t>(ix) * 0x1F123BB5ull +
                                         static_cast<uint64_t>(iy) *
                                             0x5BD1E995ull +
                                         0x9E3779B9ull);
    return static_cast<double>(hash >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  double gx = x / cell, gy = y / cell;
  int64_t x0 = static_cast<int64_t>(std::floor(gx));
  int64_t y0 = static_cast<int64_t>(std::floor(gy));
  double fx = gx - x0, fy = gy - y0;
  auto smooth = [](double t) { return t * t * (3 - 2 * t); };
  double sx = smooth(fx), sy = smooth(fy);
  double v00 = lattice(x0, y0), v10 = lattice(x0 + 1, y0);
  double v01 = lattice(x0, y0 + 1), v11 = lattice(x0 + 1, y0 + 1);
  return (1 - sy) * ((1 - sx) * v00 + sx * v10) +
         sy * ((1 - sx) * v01 + sx * v11);
}

// fast per-pixel hash in [0, 1)
double speckle(const CounterRng& rng, uint64_t stream, int x, int y) {
  return static_cast<double>(
             rng.bits(stream, static_cast<uint64_t>(y) * 0x100000001ull + x) >>
             11) *
         0x1.0p-53;
}

// blocky hash noise: constant over cell x cell pixels; survives both the
// Gaussian blur in the edge detector and coarse JPEG quantization
double clump(const CounterRng& rng, uint64_t stream, int x, int y, int cell) {
  return speckle(rng, stream, x / cell, y / cell);
}

void draw_building(Painter& p, const CounterRng& nrng, int x0, int x1, int top,
                   int bottom) {
  int base = p.ui(100, 150);
  int tint = p.ui(-10, 10);
  for (int y = std::max(0, top); y < bottom; ++y)
    for (int x = std::max(0, x0); x < std::min(p.img.width, x1); ++x) {
      int facade = static_cast<int>(6 * speckle(nrng, 11, x, y) - 3);
      p.put(x, y, base + tint + facade, base + facade, base - tint + facade,
            kBuilding);
    }
  // dark roofline strip: a continuous strong edge against the sky
  p.rect(x0, top, x1, top + std::max(2, p.img.height / 90), 55, 55, 58,
         kBuilding);
  // window grid
  int win_w = p.ui(8, 14), win_h = p.ui(10, 16);
  int gap_x = win_w + p.ui(7, 12), gap_y = win_h + p.ui(9, 14);
  for (int y = top + gap_y / 2; y + win_h < bottom - 4; y += gap_y) {
    for (int x = x0 + gap_x / 2; x + win_w < x1 - 2; x += gap_x) {
      int lum = (p.u() < 0.3) ? base + p.ui(70, 95) : base - p.ui(60, 85);
      p.rect(x, y, x + win_w, y + win_h, lum, lum, lum + 4, kBuilding);
    }
  }
}

void draw_tree(Painter& p, const CounterRng& nrng, int cx, int base_y,
               int size) {
  p.rect(cx - size / 12 - 1, base_y - size / 2, cx + size / 12 + 1, base_y, 62,
         54, 46, kVegetation);
  int blobs = 24 + size / 3;
  for (int i = 0; i < blobs; ++i) {
    int dx = p.ui(-size / 2, size / 2);
    int dy = p.ui(-size, -size / 4);
    int r = p.ui(size / 10, size / 5);
    int cyy = base_y + dy;
    for (int y = cyy - r; y <= cyy + r; ++y)
      for (int x = cx + dx - r; x <= cx + dx + r; ++x) {
        if ((x - cx - dx) * (x - cx - dx) + (y - cyy) * (y - cyy) > r * r)
          continue;
        // leaf clusters a few pixels wide: high contrast at a scale that
        // both Canny and low-Q JPEG still see
        int lum = 35 + static_cast<int>(118 * clump(nrng, 12, x, y, 3)) +
                  static_cast<int>(12 * speckle(nrng, 18, x, y)) - 6;
        p.put(x, y, lum - 14, lum, lum - 18, kVegetation);
      }
  }
}

void draw_car(Painter& p, const CounterRng& nrng, int cx, int cy, int length,
              int height) {
  // mostly desaturated paint, occasionally colorful
  int lum = p.ui(35, 200);
  int r = lum, g = lum, b = lum;
  double pick = p.u();
  if (pick < 0.18) {
    r = lum + 40;
  } else if (pick < 0.36) {
    b = lum + 40;
  }
  int x0 = cx - length / 2, x1 = cx + length / 2;
  int y0 = cy - height, y1 = cy;
  for (int y = std::max(0, y0 + height / 3); y < std::min(p.img.height, y1);
       ++y)
    for (int x = std::max(0, x0); x < std::min(p.img.width, x1); ++x) {
      int sheen = static_cast<int>(10 * speckle(nrng, 13, x, y)) - 5;
      p.put(x, y, r + sheen, g + sheen, b + sheen, kCar);
    }
  p.rect(x0 + length / 6, y0, x1 - length / 6, y0 + height / 3 + 2,
         r * 3 / 4, g * 3 / 4, b * 3 / 4, kCar);
  p.rect(x0 + length / 5, y0 + 2, x1 - length / 5, y0 + height / 3, 165, 175,
         185, kCar);
  int wr = std::max(2, height / 5);
  p.disc(x0 + length / 5, y1 - 1, wr, 28, 28, 28, kCar);
  p.disc(x1 - length / 5, y1 - 1, wr, 28, 28, 28, kCar);
}

void draw_person(Painter& p, int cx, int base_y, int h) {
  int shirt = p.ui(60, 190);
  p.rect(cx - h / 8, base_y - h * 2 / 3, cx + h / 8, base_y, 45, 45, 55,
         kPerson);
  p.rect(cx - h / 7, base_y - h, cx + h / 7, base_y - h * 2 / 3, shirt,
         shirt - 20, shirt - 25, kPerson);
  p.disc(cx, base_y - h, std::max(2, h / 7), 210, 185, 165, kPerson);
}

}  // namespace

SynthScene synth_scene(int width, int height, uint64_t seed) {
  if (width < 64 || height < 64)
    raise(ErrorCode::InvalidArgument, "scene must be at least 64x64");

  Painter p(width, height, seed, /*stream=*/0xA11CE);
  const CounterRng nrng(seed ^ 0x517EC0DEull);

  const int h = height, w = width;
  auto horizon_at = [&](int x) {
    return static_cast<int>(
        h * (0.34 + 0.035 * value_noise(nrng, 1, x, 0, w / 5.0)));
  };
  auto sidewalk_at = [&](int x) {
    return static_cast<int>(
        h * (0.57 + 0.012 * value_noise(nrng, 2, x, 40, w / 4.0)));
  };
  const int ego_top = h - std::max(8, h / 16);

  // sky: smooth gradient with soft low-saturation clouds
  for (int x = 0; x < w; ++x) {
    int hor = horizon_at(x);
    for (int y = 0; y < hor; ++y) {
      double t = static_cast<double>(y) / std::max(1, hor);
      double cloud =
          std::max(0.0, value_noise(nrng, 3, x, y * 2.0, w / 10.0)) * 22.0;
      p.put(x, y, static_cast<int>(150 + 45 * t + cloud),
            static_cast<int>(165 + 40 * t + cloud),
            static_cast<int>(195 + 25 * t + cloud * 0.7), kSky);
    }
  }

  // buildings with an irregular skyline down to the sidewalk
  int x = 0;
  while (x < w) {
    int bw = p.ui(w / 16, w / 7);
    int x1 = std::min(x + bw, w);
    int top = horizon_at(x + bw / 2) - p.ui(-h / 40, h / 7);
    int bottom_mid = sidewalk_at(x + bw / 2);
    draw_building(p, nrng, x, x1, std::max(0, top), bottom_mid);
    x += bw;
  }

  // sidewalk band and road with asphalt texture
  for (int xx = 0; xx < w; ++xx) {
    int sw_top = sidewalk_at(xx);
    int sw_h = std::max(6, h / 26);
    for (int y = sw_top; y < std::min(sw_top + sw_h, ego_top); ++y) {
      int n = static_cast<int>(8 * speckle(nrng, 14, xx, y)) - 4;
      p.put(xx, y, 150 + n, 147 + n, 149 + n, kSidewalk);
    }
    for (int y = sw_top + sw_h; y < ego_top; ++y) {
      double t = static_cast<double>(y - sw_top) / std::max(1, h - sw_top);
      int lum = static_cast<int>(92 + 38 * t);
      int n = static_cast<int>(16 * clump(nrng, 15, xx, y, 2)) - 8 +
              static_cast<int>(6 * speckle(nrng, 19, xx, y)) - 3;
      p.put(xx, y, lum + n - 2, lum + n, lum + n + 1, kRoad);
    }
  }

  // lane markings: dashed center line plus a solid edge line
  int lane_y = (sidewalk_at(w / 2) + ego_top) / 2 + h / 40;
  int mark_h = std::max(3, h / 110);
  for (int seg = 0; seg < w; seg += w / 16) {
    for (int y = lane_y; y < lane_y + mark_h; ++y)
      for (int xx = seg + w / 80; xx < seg + w / 28; ++xx) {
        int n = static_cast<int>(10 * speckle(nrng, 15, xx, y)) - 5;
        p.put(xx, y, 225 + n, 222 + n, 208 + n, kRoad);
      }
  }
  for (int xx = 0; xx < w; ++xx) {
    int y0 = sidewalk_at(xx) + std::max(6, h / 26) + h / 50;
    for (int y = y0; y < y0 + mark_h; ++y) {
      int n = static_cast<int>(10 * speckle(nrng, 15, xx, y)) - 5;
      p.put(xx, y, 215 + n, 212 + n, 200 + n, kRoad);
    }
  }
  // crosswalk stripes in the foreground
  if (p.u() < 0.8) {
    int cw_y0 = ego_top - h / 9;
    int cw_x0 = p.ui(0, w / 2);
    for (int stripe = 0; stripe < 10; ++stripe) {
      int sx = cw_x0 + stripe * w / 24;
      if (sx + w / 48 >= w) break;
      for (int y = cw_y0; y < std::min(cw_y0 + h / 12, ego_top); ++y)
        for (int xx = sx; xx < sx + w / 48; ++xx) {
          int n = static_cast<int>(12 * speckle(nrng, 15, xx, y)) - 6;
          p.put(xx, y, 208 + n, 206 + n, 198 + n, kRoad);
        }
    }
  }

  // grass strip fragments along the sidewalk
  int strips = p.ui(3, 6);
  for (int i = 0; i < strips; ++i) {
    int gx0 = p.ui(0, w - w / 8);
    int gw = p.ui(w / 20, w / 8);
    for (int xx = gx0; xx < std::min(w, gx0 + gw); ++xx) {
      int sw_top = sidewalk_at(xx);
      for (int y = sw_top; y < std::min(sw_top + std::max(4, h / 50), ego_top);
           ++y) {
        int lum = 55 + static_cast<int>(70 * clump(nrng, 16, xx, y, 2));
        p.put(xx, y, lum - 18, lum, lum - 24, kTerrain);
      }
    }
  }

  // trees in front of the buildings
  int trees = std::max(6, w / 140);
  for (int i = 0; i < trees; ++i) {
    int cx = p.ui(30, w - 30);
    draw_tree(p, nrng, cx, sidewalk_at(cx) + h / 40,
              p.ui(h / 7, h / 4));
  }

  // low bushes along the sidewalk
  int bushes = std::max(6, w / 110);
  for (int i = 0; i < bushes; ++i) {
    int cx = p.ui(15, w - 15);
    int cy = sidewalk_at(cx) + p.ui(0, h / 50);
    int r = p.ui(h / 60, h / 28);
    for (int y = cy - r; y <= cy + r; ++y)
      for (int xx = cx - r; xx <= cx + r; ++xx) {
        if ((xx - cx) * (xx - cx) + (y - cy) * (y - cy) > r * r) continue;
        int lum = 45 + static_cast<int>(85 * clump(nrng, 12, xx, y, 3));
        p.put(xx, y, lum - 14, lum, lum - 18, kVegetation);
      }
  }

  // poles and signs
  int poles = std::max(5, w / 180);
  for (int i = 0; i < poles; ++i) {
    int px = p.ui(10, w - 10);
    int top = horizon_at(px) + p.ui(0, h / 10);
    p.rect(px, top, px + std::max(2, w / 650), sidewalk_at(px) + h / 30, 72,
           74, 77, kPole);
    if (p.u() < 0.8) {
      int s = std::max(6, h / 36);
      int muted = p.ui(120, 180);
      p.rect(px - s / 2, top, px + s / 2, top + s, muted + 35, muted - 30,
             muted - 30, kTrafficSign);
    }
  }

  // vehicles on the road
  int cars = p.ui(4, 8);
  for (int i = 0; i < cars; ++i) {
    int road_lo = sidewalk_at(w / 2) + h / 18;
    int cy = p.ui(road_lo, std::max(road_lo + 4, ego_top - 4));
    double depth =
        static_cast<double>(cy - sidewalk_at(w / 2)) / (h - sidewalk_at(w / 2));
    int length = static_cast<int>(w * (0.045 + 0.085 * depth));
    int car_h = static_cast<int>(length * 0.45);
    draw_car(p, nrng, p.ui(length, w - length), cy, length, car_h);
  }

  // pedestrians
  int people = p.ui(2, 6);
  for (int i = 0; i < people; ++i) {
    int cx = p.ui(20, w - 20);
    draw_person(p, cx, sidewalk_at(cx) + h / 55, p.ui(h / 20, h / 12));
  }

  // ego-vehicle hood
  for (int y = ego_top; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      int n = static_cast<int>(6 * speckle(nrng, 17, xx, y)) - 3;
      p.put(xx, y, 32 + n, 34 + n, 38 + n, kEgoVehicle);
    }

  // grain off the sky: keeps originals dashcam-sized without inflating
  // the cheap-to-code sky blocks
  const size_t n = static_cast<size_t>(w) * h;
  for (size_t i = 0; i < n; ++i) {
    if (p.labels[i] == kSky) continue;
    uint64_t bits = nrng.bits(4, i);
    for (int c = 0; c < 3; ++c) {
      int delta = static_cast<int>((bits >> (c * 4)) & 0x7) - 3;
      p.img.data[i * 3 + c] =
          Painter::clamp8(p.img.data[i * 3 + c] + delta);
    }
  }

  SynthScene scene;
  scene.caption.text =
      "a city street scene with " + std::to_string(cars) +
      " cars on the road, " + std::to_string(people) +
      " pedestrians on the sidewalk, buildings with many windows, trees and "
      "an overcast sky";
  scene.image = std::move(p.img);
  scene.segmap = SegMap::from_labels(width, height, std::move(p.labels),
                                     ClassTaxonomy::cityscapes34());
  return scene;
}

std::vector<std::filesystem::path> synth_corpus(
    const std::filesystem::path& dir, const SynthCorpusOptions& opts) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> images;
  for (int i = 0; i < opts.count; ++i) {
    SynthScene scene = synth_scene(opts.width, opts.height,
                                   opts.seed + static_cast<uint64_t>(i));
    char stem[32];
    std::snprintf(stem, sizeof(stem), "scene_%03d", i);
    std::filesystem::path img_path = dir / (std::string(stem) + ".png");
    save_png(scene.image, img_path);

    ImageBuffer label_img =
        ImageBuffer::create(scene.segmap.width, scene.segmap.height, 1);
    label_img.data = scene.segmap.labels;
    save_png(label_img, dir / (std::string(stem) + ".labels.png"));

    write_file(dir / (std::string(stem) + ".caption.txt"),
               std::span<const uint8_t>(
                   reinterpret_cast<const uint8_t*>(scene.caption.text.data()),
                   scene.caption.text.size()));
    images.push_back(img_path);
  }
  return images;
}

}  // namespace semwire
