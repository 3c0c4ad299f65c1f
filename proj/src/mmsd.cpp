#include "mmsd.hpp"

#include <algorithm>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "canny.hpp"
#include "codec.hpp"
#include "error.hpp"
#include "imageio.hpp"

namespace semwire {

namespace {

using nlohmann::json;

std::vector<uint8_t> meta_to_bytes(const MmsdMeta& meta) {
  json j;
  j["kind"] = "mmsd";
  j["orig_w"] = meta.orig_w;
  j["orig_h"] = meta.orig_h;
  j["seg_w"] = meta.seg_w;
  j["seg_h"] = meta.seg_h;
  j["canny_low"] = meta.canny_low;
  j["canny_high"] = meta.canny_high;
  j["num_classes"] = meta.num_classes;
  std::string text = j.dump();
  return {text.begin(), text.end()};
}

MmsdMeta meta_from_bytes(std::span<const uint8_t> bytes) {
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    raise(ErrorCode::Container, "MET entry is not valid JSON");
  if (j.value("kind", "") != "mmsd")
    raise(ErrorCode::Container, "MET entry does not describe an MMSD payload");
  MmsdMeta meta;
  try {
    meta.orig_w = j.at("orig_w").get<int>();
    meta.orig_h = j.at("orig_h").get<int>();
    meta.seg_w = j.at("seg_w").get<int>();
    meta.seg_h = j.at("seg_h").get<int>();
    meta.canny_low = j.at("canny_low").get<double>();
    meta.canny_high = j.at("canny_high").get<double>();
    meta.num_classes = j.at("num_classes").get<int>();
  } catch (const json::exception& e) {
    raise(ErrorCode::Container, std::string("MET entry incomplete: ") + e.what());
  }
  return meta;
}

ImageBuffer labels_as_image(const SegMap& seg) {
  ImageBuffer img = ImageBuffer::create(seg.width, seg.height, 1);
  img.data = seg.labels;
  return img;
}

PayloadContainer assemble(const SegMap& seg_small, const ImageBuffer& edges,
                          const Caption& caption, const MmsdMeta& meta) {
  EncodedBlob seg_blob =
      encode(labels_as_image(seg_small), CodecFormat::WebpLossless, 0);
  EncodedBlob edge_blob = encode(edges, CodecFormat::WebpLossless, 0);

  PayloadContainer container;
  container.entries.push_back(make_entry(kTagMeta, meta_to_bytes(meta)));
  container.entries.push_back(make_entry(kTagSeg, std::move(seg_blob.bytes)));
  container.entries.push_back(make_entry(kTagEdge, std::move(edge_blob.bytes)));
  container.entries.push_back(make_entry(kTagCaption, caption.text));
  return container;
}

std::string replace_all(std::string s, std::string_view key,
                        const std::string& value) {
  size_t pos = 0;
  while ((pos = s.find(key, pos)) != std::string::npos) {
    s.replace(pos, key.size(), value);
    pos += value.size();
  }
  return s;
}

}  // namespace

PayloadContainer mmsd_pack(const ImageBuffer& img, const SegMap& seg,
                           const Caption& caption, const MmsdOptions& opts) {
  img.validate();
  seg.validate();
  if (seg.width != img.width || seg.height != img.height)
    raise(ErrorCode::Dimension, "segmap dimensions must equal image dimensions");
  if (caption.empty())
    raise(ErrorCode::InvalidArgument, "caption must be nonempty");

  MmsdMeta meta;
  meta.orig_w = img.width;
  meta.orig_h = img.height;
  meta.seg_w = std::min(opts.seg_target_w, img.width);
  meta.seg_h = std::min(opts.seg_target_h, img.height);
  meta.canny_low = opts.canny_low;
  meta.canny_high = opts.canny_high;
  meta.num_classes = seg.taxonomy->num_classes();

  SegMap seg_small = downsample_segmap(seg, meta.seg_w, meta.seg_h);
  ImageBuffer edges =
      canny(to_grayscale(img), opts.canny_low, opts.canny_high);
  return assemble(seg_small, edges, caption, meta);
}

MmsdUnpacked mmsd_unpack(const PayloadContainer& container,
                         std::shared_ptr<const ClassTaxonomy> taxonomy) {
  const ContainerEntry* met = container.find(kTagMeta);
  const ContainerEntry* seg = container.find(kTagSeg);
  const ContainerEntry* edg = container.find(kTagEdge);
  const ContainerEntry* cap = container.find(kTagCaption);
  if (!met || !seg || !edg || !cap)
    raise(ErrorCode::Container,
          "MMSD container requires MET, SEG, EDG and CAP entries");

  MmsdUnpacked out;
  out.meta = meta_from_bytes(met->body);
  if (out.meta.num_classes != taxonomy->num_classes())
    raise(ErrorCode::Label,
          "payload was packed with " + std::to_string(out.meta.num_classes) +
              " classes but the taxonomy defines " +
              std::to_string(taxonomy->num_classes()));

  ImageBuffer seg_img = decode_webp(seg->body);
  if (seg_img.width != out.meta.seg_w || seg_img.height != out.meta.seg_h)
    raise(ErrorCode::Container, "SEG entry does not match MET dimensions");
  ImageBuffer seg_gray = ImageBuffer::create(seg_img.width, seg_img.height, 1);
  for (size_t i = 0; i < seg_gray.data.size(); ++i) {
    uint8_t r = seg_img.data[i * 3];
    if (seg_img.data[i * 3 + 1] != r || seg_img.data[i * 3 + 2] != r)
      raise(ErrorCode::Container, "SEG entry is not a label image");
    seg_gray.data[i] = r;
  }
  SegMap seg_small = SegMap::from_labels(
      seg_gray.width, seg_gray.height, std::move(seg_gray.data), taxonomy);
  out.seg_full = upsample_segmap(seg_small, out.meta.orig_w, out.meta.orig_h);

  ImageBuffer edge_rgb = decode_webp(edg->body);
  if (edge_rgb.width != out.meta.orig_w || edge_rgb.height != out.meta.orig_h)
    raise(ErrorCode::Container, "EDG entry does not match MET dimensions");
  out.edges = ImageBuffer::create(edge_rgb.width, edge_rgb.height, 1);
  for (size_t i = 0; i < out.edges.data.size(); ++i)
    out.edges.data[i] = edge_rgb.data[i * 3];

  out.caption.text.assign(cap->body.begin(), cap->body.end());
  return out;
}

PayloadContainer mmsd_repack(const MmsdUnpacked& unpacked) {
  SegMap seg_small =
      downsample_segmap(unpacked.seg_full, unpacked.meta.seg_w,
                        unpacked.meta.seg_h);
  return assemble(seg_small, unpacked.edges, unpacked.caption, unpacked.meta);
}

double compression_ratio(const std::filesystem::path& original_path,
                         const PayloadContainer& payload) {
  std::error_code ec;
  auto original_bytes = std::filesystem::file_size(original_path, ec);
  if (ec) raise(ErrorCode::Io, "cannot stat: " + original_path.string());
  return static_cast<double>(original_bytes) /
         static_cast<double>(payload.total_bytes());
}

MmsdExportPaths mmsd_export(const MmsdUnpacked& unpacked,
                            const std::filesystem::path& dir,
                            const std::string& stem) {
  std::filesystem::create_directories(dir);
  MmsdExportPaths paths;
  paths.seg = dir / (stem + "_seg.png");
  paths.edge = dir / (stem + "_edge.png");
  paths.caption = dir / (stem + "_caption.txt");
  paths.meta = dir / (stem + "_met.json");

  save_png(labels_as_image(unpacked.seg_full), paths.seg);
  save_png(unpacked.edges, paths.edge);
  write_file(paths.caption,
             std::span<const uint8_t>(
                 reinterpret_cast<const uint8_t*>(unpacked.caption.text.data()),
                 unpacked.caption.text.size()));
  write_file(paths.meta, meta_to_bytes(unpacked.meta));
  return paths;
}

ImageBuffer run_reconstruct_cmd(const std::string& cmd_template,
                                const MmsdUnpacked& unpacked,
                                const std::filesystem::path& workdir) {
  MmsdExportPaths paths = mmsd_export(unpacked, workdir, "payload");
  std::filesystem::path out_path = workdir / "reconstructed.png";

  std::string cmd = cmd_template;
  cmd = replace_all(cmd, "{seg}", paths.seg.string());
  cmd = replace_all(cmd, "{edge}", paths.edge.string());
  cmd = replace_all(cmd, "{caption}", paths.caption.string());
  cmd = replace_all(cmd, "{out}", out_path.string());

  int status = std::system(cmd.c_str());
  if (status != 0)
    raise(ErrorCode::External, "reconstruction command failed with status " +
                                   std::to_string(status) + ": " + cmd);
  ImageBuffer img = load_image(out_path);
  if (img.width != unpacked.meta.orig_w || img.height != unpacked.meta.orig_h)
    raise(ErrorCode::External,
          "reconstruction output has wrong dimensions: expected " +
              std::to_string(unpacked.meta.orig_w) + "x" +
              std::to_string(unpacked.meta.orig_h));
  return img;
}

}  // namespace semwire
