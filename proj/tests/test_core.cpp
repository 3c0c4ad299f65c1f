#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <fstream>

#include "caption.hpp"
#include "container.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "imageio.hpp"
#include "rng.hpp"
#include "segmap.hpp"
#include "taxonomy.hpp"

using namespace semwire;
using semwire::testing::TempDir;
using semwire::testing::gradient_image;

TEST_CASE("image indexing follows (y*width + x)*channels + c") {
  ImageBuffer img = gradient_image(13, 9, 3);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c)
        CHECK(img.at(x, y, c) ==
              img.data[(static_cast<size_t>(y) * img.width + x) * 3 + c]);
}

TEST_CASE("image creation validates dimensions and channels") {
  CHECK_THROWS_AS(ImageBuffer::create(0, 4, 3), Error);
  CHECK_THROWS_AS(ImageBuffer::create(4, 4, 2), Error);
  ImageBuffer img = ImageBuffer::create(4, 4, 1, 7);
  CHECK(img.data.size() == 16);
  CHECK(img.data[5] == 7);
}

TEST_CASE("counter rng is order-independent and seed-sensitive") {
  CounterRng a(42), b(42), c(43);
  CHECK(a.bits(0, 17) == b.bits(0, 17));
  CHECK(a.bits(0, 17) != c.bits(0, 17));
  CHECK(a.bits(1, 17) != a.bits(0, 17));
  double u = a.uniform01(0, 5);
  CHECK(u >= 0.0);
  CHECK(u < 1.0);
  for (uint64_t n : {1ull, 2ull, 10ull, 1000ull})
    for (uint64_t i = 0; i < 50; ++i) CHECK(a.bounded(2, i, n) < n);
}

TEST_CASE("caption byte length and word count") {
  Caption cap{"a car on the road"};
  CHECK(cap.byte_len() == 17);
  CHECK(cap.word_count() == 5);
  CHECK(Caption{}.empty());
  CHECK(Caption{"\xc3\xa9"}.byte_len() == 2);  // UTF-8 bytes, not code points
}

TEST_CASE("built-in cityscapes taxonomy has 34 dense classes") {
  auto tax = ClassTaxonomy::cityscapes34();
  CHECK(tax->num_classes() == 34);
  CHECK(tax->group(26) == SemanticGroup::Vehicles);
  CHECK(tax->group(24) == SemanticGroup::Humans);
  CHECK(tax->group(7) == SemanticGroup::FlatSurfaces);
  CHECK(tax->group(11) == SemanticGroup::Construction);
  CHECK(tax->group(20) == SemanticGroup::Objects);
  CHECK(tax->group(21) == SemanticGroup::Nature);
  CHECK(tax->group(23) == SemanticGroup::Sky);
  CHECK(tax->group(0) == SemanticGroup::Background);
}

TEST_CASE("bundled taxonomy file matches the built-in table") {
  auto from_file = ClassTaxonomy::load(
      std::filesystem::path(SEMWIRE_SOURCE_DIR) / "data" /
      "cityscapes34.groups");
  auto builtin = ClassTaxonomy::cityscapes34();
  REQUIRE(from_file.num_classes() == builtin->num_classes());
  for (int c = 0; c < builtin->num_classes(); ++c) {
    CHECK(from_file.group_of[c] == builtin->group_of[c]);
    CHECK(from_file.names[c] == builtin->names[c]);
  }
}

TEST_CASE("taxonomy parsing rejects malformed tables") {
  CHECK_THROWS_AS(ClassTaxonomy::parse("0 road flat_surfaces\n2 sky sky\n"),
                  Error);  // gap in ids
  CHECK_THROWS_AS(ClassTaxonomy::parse("0 road nowhere\n"), Error);
  CHECK_THROWS_AS(ClassTaxonomy::parse("# only comments\n"), Error);
  CHECK_THROWS_AS(ClassTaxonomy::parse("0 road\n"), Error);
}

TEST_CASE("group name round trip") {
  for (int g = 0; g < kNumGroups; ++g) {
    auto group = static_cast<SemanticGroup>(g);
    auto parsed = group_from_name(group_name(group));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == group);
  }
  CHECK(group_from_name("Flat surfaces") == SemanticGroup::FlatSurfaces);
  CHECK(!group_from_name("plasma").has_value());
}

TEST_CASE("segmap rejects out-of-range labels") {
  auto tax = semwire::testing::group_taxonomy();  // 8 classes
  std::vector<uint8_t> ok(16, 7);
  CHECK_NOTHROW(SegMap::from_labels(4, 4, ok, tax));
  std::vector<uint8_t> bad(16, 8);
  CHECK_THROWS_AS(SegMap::from_labels(4, 4, bad, tax), Error);
  try {
    SegMap::from_labels(4, 4, bad, tax);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Label);
  }
}

TEST_CASE("group histogram partitions all pixels") {
  auto tax = ClassTaxonomy::cityscapes34();
  int w = 68, h = 34;
  std::vector<uint8_t> labels(static_cast<size_t>(w) * h);
  for (size_t i = 0; i < labels.size(); ++i)
    labels[i] = static_cast<uint8_t>(i % 34);
  SegMap seg = SegMap::from_labels(w, h, labels, tax);
  std::array<size_t, kNumGroups> histogram{};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      ++histogram[static_cast<int>(seg.group_at(x, y))];
  size_t total = 0;
  for (size_t n : histogram) total += n;
  CHECK(total == static_cast<size_t>(w) * h);
  for (size_t n : histogram) CHECK(n > 0);
}

TEST_CASE("container: single caption entry is 16 bytes") {
  PayloadContainer c;
  c.entries.push_back(make_entry(kTagCaption, std::string_view("a car")));
  auto bytes = c.serialize();
  CHECK(bytes.size() == 16);  // 4 magic + 3 tag + 4 length + 5 body
  CHECK(c.total_bytes() == 16);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SMC1");
}

TEST_CASE("container round trip is the identity on bytes") {
  CounterRng rng(2024);
  const std::array<std::string_view, 7> tags = {
      kTagSeg, kTagEdge, kTagCaption, kTagJpeg, kTagMask, kTagMeta, "ZZZ"};
  for (int iter = 0; iter < 200; ++iter) {
    PayloadContainer c;
    uint64_t counter = iter * 1000;
    int n = 1 + static_cast<int>(rng.bounded(0, counter++, 6));
    for (int e = 0; e < n; ++e) {
      auto tag = tags[rng.bounded(0, counter++, tags.size())];
      size_t len = 1 + rng.bounded(0, counter++, 600);
      std::vector<uint8_t> body(len);
      for (auto& b : body)
        b = static_cast<uint8_t>(rng.bits(1, counter++) & 0xFF);
      c.entries.push_back(make_entry(tag, std::move(body)));
    }
    auto bytes = c.serialize();
    PayloadContainer parsed = PayloadContainer::parse(bytes);
    CHECK(parsed.serialize() == bytes);
  }
}

TEST_CASE("container flags unknown tags but preserves them") {
  PayloadContainer c;
  c.entries.push_back(make_entry("XYZ", std::string_view("opaque")));
  c.entries.push_back(make_entry(kTagCaption, std::string_view("hello")));
  auto bytes = c.serialize();
  PayloadContainer parsed = PayloadContainer::parse(bytes);
  CHECK(parsed.has_unrecognized());
  CHECK(parsed.entries[0].tag_view() == "XYZ");
  CHECK(parsed.serialize() == bytes);
  CHECK(!PayloadContainer::parse(
             PayloadContainer{{make_entry(kTagCaption,
                                          std::string_view("x"))}}
                 .serialize())
             .has_unrecognized());
}

TEST_CASE("container parse errors") {
  PayloadContainer c;
  c.entries.push_back(make_entry(kTagCaption, std::string_view("abc")));
  auto bytes = c.serialize();

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(PayloadContainer::parse(bad_magic), Error);

  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(PayloadContainer::parse(truncated), Error);

  std::vector<uint8_t> short_header(bytes.begin(), bytes.begin() + 6);
  CHECK_THROWS_AS(PayloadContainer::parse(short_header), Error);

  PayloadContainer empty_body;
  empty_body.entries.push_back(ContainerEntry{{'C', 'A', 'P'}, {}});
  CHECK_THROWS_AS(empty_body.serialize(), Error);
}

TEST_CASE("container save/load round trip") {
  TempDir dir("container");
  PayloadContainer c;
  c.entries.push_back(make_entry(kTagCaption, std::string_view("persisted")));
  auto path = dir.path / "payload.smc";
  c.save(path);
  PayloadContainer loaded = PayloadContainer::load(path);
  CHECK(loaded.serialize() == c.serialize());
}

TEST_CASE("png round trip preserves pixels and layout") {
  TempDir dir("imageio");
  ImageBuffer rgb = gradient_image(37, 21, 3);
  auto rgb_path = dir.path / "rgb.png";
  save_png(rgb, rgb_path);
  ImageBuffer rgb_loaded = load_image(rgb_path);
  CHECK(rgb_loaded.channels == 3);
  CHECK(rgb_loaded.data == rgb.data);

  ImageBuffer gray = gradient_image(16, 8, 1);
  auto gray_path = dir.path / "gray.png";
  save_png(gray, gray_path);
  ImageBuffer gray_loaded = load_image(gray_path);
  CHECK(gray_loaded.channels == 1);
  CHECK(gray_loaded.data == gray.data);
}

TEST_CASE("load_image error paths") {
  TempDir dir("imageio_err");
  CHECK_THROWS_AS(load_image(dir.path / "missing.png"), Error);

  auto junk = dir.path / "junk.png";
  std::ofstream(junk, std::ios::binary) << "not an image";
  CHECK_THROWS_AS(load_image(junk), Error);

  // Valid signature, truncated body.
  ImageBuffer img = gradient_image(64, 64, 3);
  auto path = dir.path / "trunc.png";
  save_png(img, path);
  auto bytes = read_file(path);
  bytes.resize(bytes.size() / 2);
  write_file(path, bytes);
  CHECK_THROWS_AS(load_image(path), Error);
}

TEST_CASE("load_segmap validates labels and channel count") {
  TempDir dir("segmap_io");
  auto tax = semwire::testing::group_taxonomy();

  ImageBuffer labels = ImageBuffer::create(12, 10, 1);
  for (size_t i = 0; i < labels.data.size(); ++i)
    labels.data[i] = static_cast<uint8_t>(i % kNumGroups);
  auto ok_path = dir.path / "ok.png";
  save_png(labels, ok_path);
  SegMap seg = load_segmap(ok_path, tax);
  CHECK(seg.width == 12);
  CHECK(seg.label_at(3, 0) == 3);

  labels.data[5] = kNumGroups;  // == C, out of range
  auto bad_path = dir.path / "bad.png";
  save_png(labels, bad_path);
  CHECK_THROWS_AS(load_segmap(bad_path, tax), Error);

  auto rgb_path = dir.path / "rgb.png";
  save_png(gradient_image(8, 8, 3), rgb_path);
  CHECK_THROWS_AS(load_segmap(rgb_path, tax), Error);
}
