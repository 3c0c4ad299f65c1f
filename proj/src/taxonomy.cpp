#include "taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace semwire {

namespace {

const std::array<const char*, kNumGroups> kGroupNames = {
    "vehicles",     "humans", "flat_surfaces", "construction",
    "objects",      "nature", "sky",           "background",
};

std::string lowered(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Cityscapes labelIds 0..33, grouped by the dataset's coarse categories:
// flat -> flat_surfaces, human -> humans, vehicle -> vehicles,
// construction/object/nature/sky kept, void -> background.
constexpr const char* kCityscapes34 = R"(# Cityscapes labelIds -> semantic groups
0 unlabeled background
1 ego vehicle background
2 rectification border background
3 out of roi background
4 static background
5 dynamic background
6 ground background
7 road flat_surfaces
8 sidewalk flat_surfaces
9 parking flat_surfaces
10 rail track flat_surfaces
11 building construction
12 wall construction
13 fence construction
14 guard rail construction
15 bridge construction
16 tunnel construction
17 pole objects
18 polegroup objects
19 traffic light objects
20 traffic sign objects
21 vegetation nature
22 terrain nature
23 sky sky
24 person humans
25 rider humans
26 car vehicles
27 truck vehicles
28 bus vehicles
29 caravan vehicles
30 trailer vehicles
31 train vehicles
32 motorcycle vehicles
33 bicycle vehicles
)";

}  // namespace

const char* group_name(SemanticGroup group) {
  return kGroupNames[static_cast<int>(group)];
}

std::optional<SemanticGroup> group_from_name(std::string_view name) {
  std::string key = lowered(name);
  std::replace(key.begin(), key.end(), '-', '_');
  std::replace(key.begin(), key.end(), ' ', '_');
  for (int i = 0; i < kNumGroups; ++i) {
    if (key == kGroupNames[i]) return static_cast<SemanticGroup>(i);
  }
  // Accept the headings as they appear in config files.
  if (key == "flat" || key == "flatsurfaces") return SemanticGroup::FlatSurfaces;
  if (key == "human") return SemanticGroup::Humans;
  if (key == "vehicle") return SemanticGroup::Vehicles;
  if (key == "object") return SemanticGroup::Objects;
  return std::nullopt;
}

ClassTaxonomy ClassTaxonomy::parse(std::string_view text) {
  struct Row {
    int id;
    std::string name;
    SemanticGroup group;
  };
  std::vector<Row> rows;
  std::istringstream stream{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (fields >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() < 3)
      raise(ErrorCode::Format, "taxonomy line " + std::to_string(line_no) +
                                   ": expected '<id> <name> <group>'");
    int id = 0;
    try {
      id = std::stoi(tokens.front());
    } catch (const std::exception&) {
      raise(ErrorCode::Format, "taxonomy line " + std::to_string(line_no) +
                                   ": bad class id '" + tokens.front() + "'");
    }
    auto group = group_from_name(tokens.back());
    if (!group)
      raise(ErrorCode::Format, "taxonomy line " + std::to_string(line_no) +
                                   ": unknown group '" + tokens.back() + "'");
    std::string name = tokens[1];
    for (size_t i = 2; i + 1 < tokens.size(); ++i) name += " " + tokens[i];
    rows.push_back({id, name, *group});
  }
  if (rows.empty()) raise(ErrorCode::Format, "taxonomy text contains no classes");

  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.id < b.id; });
  ClassTaxonomy tax;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].id != static_cast<int>(i))
      raise(ErrorCode::Format,
            "taxonomy ids must be dense from 0; missing or duplicate id " +
                std::to_string(i));
    tax.names.push_back(rows[i].name);
    tax.group_of.push_back(rows[i].group);
  }
  if (tax.num_classes() > 256)
    raise(ErrorCode::Format, "at most 256 classes are supported");
  return tax;
}

ClassTaxonomy ClassTaxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open taxonomy file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::shared_ptr<const ClassTaxonomy> ClassTaxonomy::cityscapes34() {
  static const std::shared_ptr<const ClassTaxonomy> instance =
      std::make_shared<ClassTaxonomy>(parse(kCityscapes34));
  return instance;
}

}  // namespace semwire
