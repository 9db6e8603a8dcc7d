#include "wuigraph/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wuigraph/error.hpp"

namespace wuigraph {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kGraphFormat = "wuigraph.graph";
constexpr int kGraphVersion = 1;
constexpr const char* kBundleFormat = "wuigraph.bundle";

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_line(const std::string& line, const std::string& where) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ValidationError(where + ": unterminated quote");
  cells.push_back(trim(cur));
  return cells;
}

json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double null_to_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

/// Key for duplicate-coordinate detection; exact text equality of the
/// parsed doubles.
std::pair<double, double> coord_key(const LonLat& p) { return {p.lon, p.lat}; }

template <class Record>
std::vector<Record> last_wins(std::vector<Record> records, const std::string& path) {
  std::map<std::pair<double, double>, std::size_t> seen;
  std::vector<bool> keep(records.size(), true);
  std::size_t dupes = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = seen.emplace(coord_key(records[i].lonlat), i);
    if (!inserted) {
      keep[it->second] = false;
      it->second = i;
      ++dupes;
    }
  }
  if (dupes == 0) return records;
  warn(path + ": " + std::to_string(dupes) + " duplicate coordinate(s); keeping the last occurrence");
  std::vector<Record> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(std::move(records[i]));
  }
  return out;
}

LonLat read_lonlat(const CsvTable& t, std::size_t r, std::size_t lon_col, std::size_t lat_col) {
  LonLat p{t.number(r, lon_col), t.number(r, lat_col)};
  if (p.lon < -180.0 || p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0) {
    throw ValidationError(t.path + ":" + std::to_string(t.line[r]) + ": coordinate out of range");
  }
  return p;
}

const char* kind_name(NodeKind k) { return k == NodeKind::Building ? "building" : "vegetation"; }

}  // namespace

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::require_column(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw ValidationError(path + ": missing required column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows[row][col];
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ValidationError(path + ":" + std::to_string(line[row]) + ": column '" + header[col] +
                          "' is not a finite number ('" + s + "')");
  }
  return v;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  CsvTable t;
  t.path = path.string();
  std::string text;
  std::size_t lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (trim(text).empty()) continue;
    auto cells = split_line(text, t.path + ":" + std::to_string(lineno));
    if (t.header.empty()) {
      for (auto& c : cells) c = lower(c);
      t.header = std::move(cells);
      for (std::size_t i = 0; i < t.header.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (t.header[i] == t.header[j]) {
            throw ValidationError(t.path + ": duplicate column '" + t.header[i] + "'");
          }
        }
      }
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ValidationError(t.path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header.size()) + " fields, found " +
                            std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.line.push_back(lineno);
  }
  if (t.header.empty()) throw ValidationError(t.path + ": empty file");
  return t;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::optional<int> parse_damage(std::string_view s, bool& ok) {
  ok = true;
  const std::string k = lower(trim(s));
  if (k.empty()) return std::nullopt;
  auto starts = [&](std::string_view p) { return k.rfind(p, 0) == 0; };
  if (k == "0" || starts("no damage") || starts("no_damage") || starts("none")) return 0;
  if (k == "1" || starts("affected") || starts("minor") || starts("major") || starts("destroyed")) {
    return 1;
  }
  ok = false;
  return std::nullopt;
}

std::vector<Node> load_buildings(const fs::path& path, const Catalog& catalog) {
  const CsvTable t = read_csv(path);
  const std::size_t c_id = t.require_column("id");
  const std::size_t c_lon = t.require_column("lon");
  const std::size_t c_lat = t.require_column("lat");
  const std::size_t c_area = t.require_column("area_m2");
  const std::size_t c_type = t.require_column("building_type");
  const std::size_t c_siding = t.require_column("siding");
  struct FeatureColumn {
    StructuralFeature feature;
    StructuralSlot slot;
    std::size_t col;
  };
  const std::vector<FeatureColumn> features = {
      {StructuralFeature::Roof, StructuralSlot::Roof, t.require_column("roof")},
      {StructuralFeature::Eaves, StructuralSlot::Eaves, t.require_column("eaves")},
      {StructuralFeature::VentScreen, StructuralSlot::VentScreen, t.require_column("vent_screen")},
      {StructuralFeature::Window, StructuralSlot::Window, t.require_column("window")},
      {StructuralFeature::DeckPorch, StructuralSlot::DeckPorch, t.require_column("deck_porch")},
      {StructuralFeature::Fence, StructuralSlot::Fence, t.require_column("fence")},
  };
  const auto c_damage = t.column("damage");

  std::vector<Node> out;
  out.reserve(t.rows.size());
  std::map<std::string, std::size_t> ids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = t.path + ":" + std::to_string(t.line[r]);
    Node n;
    n.kind = NodeKind::Building;
    n.id = row[c_id];
    if (n.id.empty()) throw ValidationError(where + ": empty id");
    if (auto [it, inserted] = ids.emplace(n.id, t.line[r]); !inserted) {
      throw ValidationError(where + ": duplicate id '" + n.id + "' (first on line " +
                            std::to_string(it->second) + ")");
    }
    n.lonlat = read_lonlat(t, r, c_lon, c_lat);
    n.area = t.number(r, c_area);
    if (!(n.area > 0.0)) throw ValidationError(where + ": area_m2 must be > 0");
    n.building_type = parse_building_type(row[c_type]);
    n.material = parse_material(row[c_siding]);
    n.volume = catalog.building_volume(n.area, n.building_type);
    for (const auto& f : features) {
      if (!catalog.resolve_variant(f.feature, row[f.col])) {
        warn(where + ": unrecognized " + std::string(to_string(f.feature)) + " value '" +
             row[f.col] + "'; using the table fallback");
        n.structural[static_cast<std::size_t>(f.slot)] = catalog.fallback_score(f.feature);
      } else {
        n.structural[static_cast<std::size_t>(f.slot)] = catalog.feature_score(f.feature, row[f.col]);
      }
    }
    n.structural[static_cast<std::size_t>(StructuralSlot::Siding)] = catalog.siding_score(n.material);
    if (c_damage) {
      bool ok = true;
      n.label = parse_damage(row[*c_damage], ok);
      if (!ok) throw ValidationError(where + ": unrecognized damage value '" + row[*c_damage] + "'");
    }
    out.push_back(std::move(n));
  }
  if (out.empty()) throw ValidationError(t.path + ": no buildings");
  return out;
}

std::vector<FuelRecord> load_fuel_grid(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_x = t.require_column("x");
  const std::size_t c_y = t.require_column("y");
  const std::size_t c_fuel = t.require_column("fuel_class");
  const std::array<std::optional<std::size_t>, 4> canopy = {t.column("cbd"), t.column("cbh"),
                                                            t.column("ch"), t.column("cd")};
  std::vector<FuelRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    FuelRecord f;
    f.lonlat = read_lonlat(t, r, c_x, c_y);
    auto fc = parse_fuel_class(t.rows[r][c_fuel]);
    if (!fc) {
      throw ValidationError(t.path + ":" + std::to_string(t.line[r]) + ": unknown fuel class '" +
                            t.rows[r][c_fuel] + "'");
    }
    f.fuel_class = *fc;
    double* slots[4] = {&f.canopy.cbd, &f.canopy.cbh, &f.canopy.ch, &f.canopy.cd};
    for (std::size_t k = 0; k < 4; ++k) {
      if (canopy[k] && !t.rows[r][*canopy[k]].empty()) *slots[k] = t.number(r, *canopy[k]);
    }
    out.push_back(f);
  }
  if (out.empty()) throw ValidationError(t.path + ": empty file");
  return last_wins(std::move(out), t.path);
}

std::vector<EmbeddingRecord> load_embeddings(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_lon = t.require_column("lon");
  const std::size_t c_lat = t.require_column("lat");
  std::size_t width = 0;
  for (const auto& h : t.header) {
    if (h.size() > 1 && h[0] == 'e' &&
        std::all_of(h.begin() + 1, h.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      ++width;
    }
  }
  if (width != kEmbeddingDim) {
    throw ValidationError(t.path + ": expected " + std::to_string(kEmbeddingDim) +
                          " embedding columns e0..e63, found " + std::to_string(width));
  }
  std::array<std::size_t, kEmbeddingDim> cols{};
  for (std::size_t k = 0; k < kEmbeddingDim; ++k) cols[k] = t.require_column("e" + std::to_string(k));
  std::vector<EmbeddingRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    EmbeddingRecord e;
    e.lonlat = read_lonlat(t, r, c_lon, c_lat);
    for (std::size_t k = 0; k < kEmbeddingDim; ++k) e.values[k] = t.number(r, cols[k]);
    out.push_back(e);
  }
  if (out.empty()) throw ValidationError(t.path + ": empty file");
  return last_wins(std::move(out), t.path);
}

std::vector<TerrainRecord> load_terrain(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_lon = t.require_column("lon");
  const std::size_t c_lat = t.require_column("lat");
  const std::size_t c_slope = t.require_column("slope_deg");
  const std::size_t c_elev = t.require_column("elevation_m");
  std::vector<TerrainRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    TerrainRecord tr;
    tr.lonlat = read_lonlat(t, r, c_lon, c_lat);
    tr.slope = t.number(r, c_slope);
    tr.elevation = t.number(r, c_elev);
    out.push_back(tr);
  }
  if (out.empty()) throw ValidationError(t.path + ": empty file");
  return last_wins(std::move(out), t.path);
}

Scenario load_scenario(const fs::path& dir, const Catalog& catalog) {
  if (!fs::is_directory(dir)) throw ValidationError(dir.string() + ": not a scenario directory");
  Scenario s;
  s.buildings = load_buildings(dir / kBuildingsFile, catalog);
  s.fuel = load_fuel_grid(dir / kFuelGridFile);
  s.embeddings = load_embeddings(dir / kEmbeddingsFile);
  s.terrain = load_terrain(dir / kTerrainFile);
  return s;
}

json node_to_json(const Node& n) {
  json j = {
      {"id", n.id},
      {"kind", kind_name(n.kind)},
      {"lon", n.lonlat.lon},
      {"lat", n.lonlat.lat},
      {"x", n.location.x},
      {"y", n.location.y},
      {"fuel_class", std::string(to_string(n.fuel_class))},
      {"building_type", std::string(to_string(n.building_type))},
      {"material", std::string(to_string(n.material))},
      {"area", n.area},
      {"volume", n.volume},
      {"structural", n.structural},
      {"embedding", n.embedding},
      {"slope", n.slope},
      {"elevation", n.elevation},
      {"canopy",
       {{"cbd", nan_to_null(n.canopy.cbd)},
        {"cbh", nan_to_null(n.canopy.cbh)},
        {"ch", nan_to_null(n.canopy.ch)},
        {"cd", nan_to_null(n.canopy.cd)}}},
  };
  j["label"] = n.label ? json(*n.label) : json(nullptr);
  return j;
}

Node node_from_json(const json& j) {
  try {
    Node n;
    n.id = j.at("id").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "building" && kind != "vegetation") throw ValidationError("unknown node kind '" + kind + "'");
    n.kind = kind == "building" ? NodeKind::Building : NodeKind::Vegetation;
    n.lonlat = {j.at("lon").get<double>(), j.at("lat").get<double>()};
    n.location = {j.at("x").get<double>(), j.at("y").get<double>()};
    auto fc = parse_fuel_class(j.at("fuel_class").get<std::string>());
    if (!fc) throw ValidationError("unknown fuel class");
    n.fuel_class = *fc;
    n.building_type = parse_building_type(j.at("building_type").get<std::string>());
    n.material = parse_material(j.at("material").get<std::string>());
    n.area = j.at("area").get<double>();
    n.volume = j.at("volume").get<double>();
    n.structural = j.at("structural").get<std::array<double, kStructuralDim>>();
    n.embedding = j.at("embedding").get<std::array<double, kEmbeddingDim>>();
    n.slope = j.at("slope").get<double>();
    n.elevation = j.at("elevation").get<double>();
    const auto& c = j.at("canopy");
    n.canopy = {null_to_nan(c.at("cbd")), null_to_nan(c.at("cbh")), null_to_nan(c.at("ch")),
                null_to_nan(c.at("cd"))};
    if (!j.at("label").is_null()) n.label = j.at("label").get<int>();
    return n;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("graph: malformed node: ") + e.what());
  }
}

json graph_to_json(const ContagionGraph& g, const std::string& config_hash) {
  json nodes = json::array();
  for (const auto& n : g.nodes()) nodes.push_back(node_to_json(n));
  json edges = json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({e.source, e.target, e.weights.p_total, e.weights.p_conv, e.weights.p_rad,
                     e.weights.p_ember});
  }
  return {
      {"format", kGraphFormat},
      {"version", kGraphVersion},
      {"config_hash", config_hash},
      {"edge_fields", {"source", "target", "p_total", "p_conv", "p_rad", "p_ember"}},
      {"nodes", nodes},
      {"edges", edges},
      {"masks", {{"train", g.masks().train}, {"val", g.masks().val}, {"test", g.masks().test}}},
  };
}

ContagionGraph graph_from_json(const json& j, std::string* config_hash) {
  try {
    if (j.at("format") != kGraphFormat) throw ValidationError("graph: unexpected format tag");
    if (j.at("version") != kGraphVersion) throw ValidationError("graph: unsupported version");
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) nodes.push_back(node_from_json(n));
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 6) throw ValidationError("graph: edges must have 6 fields");
      Edge edge;
      edge.source = e[0].get<NodeIndex>();
      edge.target = e[1].get<NodeIndex>();
      edge.weights = {e[3].get<double>(), e[4].get<double>(), e[5].get<double>(), e[2].get<double>()};
      edges.push_back(edge);
    }
    SplitMasks masks;
    const auto& m = j.at("masks");
    masks.train = m.at("train").get<std::vector<NodeIndex>>();
    masks.val = m.at("val").get<std::vector<NodeIndex>>();
    masks.test = m.at("test").get<std::vector<NodeIndex>>();
    if (config_hash) *config_hash = j.at("config_hash").get<std::string>();
    return ContagionGraph(std::move(nodes), std::move(edges), std::move(masks));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("graph: malformed document: ") + e.what());
  }
}

json ModelBundle::to_json() const {
  return {
      {"format", kBundleFormat},
      {"version", kVersion},
      {"config_hash", config_hash},
      {"gat", gat.to_json()},
      {"gbdt", forest.to_json()},
      {"stacker", stacker.to_json()},
  };
}

ModelBundle ModelBundle::from_json(const json& j, const std::optional<std::string>& expected_hash) {
  try {
    if (j.at("format") != kBundleFormat) throw ValidationError("bundle: unexpected format tag");
    if (j.at("version") != kVersion) {
      throw ValidationError("bundle: version " + j.at("version").dump() + " is not supported (expected " +
                            std::to_string(kVersion) + ")");
    }
    ModelBundle b;
    b.config_hash = j.at("config_hash").get<std::string>();
    if (expected_hash && *expected_hash != b.config_hash) {
      throw ValidationError("bundle: trained with config " + b.config_hash + ", current config is " +
                            *expected_hash);
    }
    b.gat = GatParams::from_json(j.at("gat"));
    b.forest = Forest::from_json(j.at("gbdt"));
    b.stacker = StackerCoefficients::from_json(j.at("stacker"));
    return b;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bundle: malformed document: ") + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ComputationError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw ComputationError(path.string() + ": write failed");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

std::string triage_csv(const std::vector<TriageRecord>& records) {
  std::ostringstream os;
  os << "id,lon,lat,p_gnn,p_xgb,p_stack,quadrant\n";
  for (const auto& r : records) {
    os << r.id << ',' << format_double(r.lonlat.lon) << ',' << format_double(r.lonlat.lat) << ','
       << format_double(r.p_gnn) << ',' << format_double(r.p_xgb) << ',' << format_double(r.p_stack)
       << ',' << to_string(r.quadrant) << '\n';
  }
  return os.str();
}

json triage_geojson(const std::vector<TriageRecord>& records) {
  json features = json::array();
  for (const auto& r : records) {
    features.push_back({
        {"type", "Feature"},
        {"geometry", {{"type", "Point"}, {"coordinates", {r.lonlat.lon, r.lonlat.lat}}}},
        {"properties",
         {{"id", r.id},
          {"p_gnn", r.p_gnn},
          {"p_xgb", r.p_xgb},
          {"p_stack", r.p_stack},
          {"quadrant", std::string(to_string(r.quadrant))}}},
    });
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::string confusion_csv(const MetricsReport& r) {
  std::ostringstream os;
  os << "actual,predicted_survived,predicted_damaged\n";
  os << "survived," << r.tn << ',' << r.fp << '\n';
  os << "damaged," << r.fn << ',' << r.tp << '\n';
  return os.str();
}

}  // namespace wuigraph
