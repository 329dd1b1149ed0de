#include "spatspec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace spatspec {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r' && ch != ' ' && ch != '\t') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

nlohmann::json box_to_json(const Box& b) {
  nlohmann::json j;
  j["lo"] = std::vector<double>(b.lo.begin(), b.lo.begin() + b.dim);
  j["hi"] = std::vector<double>(b.hi.begin(), b.hi.begin() + b.dim);
  return j;
}

Box box_from_json(const nlohmann::json& j) {
  Box b;
  const auto lo = j.at("lo").get<std::vector<double>>();
  const auto hi = j.at("hi").get<std::vector<double>>();
  if (lo.size() != hi.size() || lo.empty() || lo.size() > 2)
    throw ConfigError("bbox needs lo/hi of length 1 or 2");
  b.dim = static_cast<int>(lo.size());
  for (int i = 0; i < b.dim; ++i) {
    b.lo[i] = lo[i];
    b.hi[i] = hi[i];
  }
  if (b.dim == 1) b.hi[1] = 1.0;
  return b;
}

nlohmann::json scheme_to_json(const SamplingScheme& s) {
  nlohmann::json j;
  if (!s.is_grid()) {
    j["kind"] = "continuous";
    return j;
  }
  j["kind"] = "grid";
  j["delta"] = std::vector<double>(s.delta.begin(), s.delta.begin() + s.dim);
  j["offset"] = std::vector<double>(s.offset.begin(), s.offset.begin() + s.dim);
  return j;
}

SamplingScheme scheme_from_json(const nlohmann::json& j, int dim) {
  const std::string kind = j.value("kind", "grid");
  if (kind == "continuous") return SamplingScheme::continuous(dim);
  if (kind != "grid") throw ConfigError("unknown sampling scheme kind '" + kind + "'");
  const auto d = j.at("delta").get<std::vector<double>>();
  const auto s = j.contains("offset") ? j.at("offset").get<std::vector<double>>()
                                      : std::vector<double>(static_cast<std::size_t>(dim), 0.0);
  if (static_cast<int>(d.size()) != dim || static_cast<int>(s.size()) != dim)
    throw ConfigError("grid delta/offset length must equal the dimension");
  Vec2 dv{d[0], dim == 2 ? d[1] : 1.0}, sv{s[0], dim == 2 ? s[1] : 0.0};
  return SamplingScheme::grid(dim, dv, sv);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Region read_region(const std::filesystem::path& header) {
  return region_from_header(read_json(header), header.parent_path());
}

Region region_from_header(const nlohmann::json& j, const std::filesystem::path& base) {
  try {
    const Box bb = box_from_json(j.at("bbox"));
    std::optional<Vec2> delta;
    if (j.contains("delta_ref")) {
      const auto d = j.at("delta_ref").get<std::vector<double>>();
      if (static_cast<int>(d.size()) != bb.dim) throw ConfigError("delta_ref length must equal the dimension");
      delta = Vec2{d[0], bb.dim == 2 ? d[1] : 1.0};
    }
    if (!j.contains("mask")) return Region::rectangle(bb, delta);
    if (!delta) throw ConfigError("a mask needs delta_ref");
    const auto path = base / j.at("mask").get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mask " + path.string());
    std::vector<std::vector<std::uint8_t>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::vector<std::uint8_t> row;
      for (const auto& c : split_csv(line)) {
        if (c != "0" && c != "1") throw ConfigError("mask cells must be 0 or 1");
        row.push_back(c == "1");
      }
      if (!rows.empty() && row.size() != rows[0].size()) throw ConfigError("ragged mask CSV");
      rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("empty mask CSV");
    std::vector<std::uint8_t> mask;
    for (const auto& r : rows) mask.insert(mask.end(), r.begin(), r.end());
    Region region(bb, *delta, std::move(mask));
    if (region.shape()[0] != static_cast<int>(rows[0].size()))
      throw ConfigError("mask column count inconsistent with bbox and delta_ref");
    return region;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("region header: ") + e.what());
  }
}

void write_region(const Region& region, const std::filesystem::path& header) {
  nlohmann::json j;
  j["bbox"] = box_to_json(region.bbox());
  j["delta_ref"] = std::vector<double>(region.delta_ref().begin(),
                                       region.delta_ref().begin() + region.dim());
  const std::string mask_name = header.stem().string() + "_mask.csv";
  j["mask"] = mask_name;
  std::ofstream out(header.parent_path() / mask_name);
  if (!out) throw ConfigError("cannot write mask");
  const auto shape = region.shape();
  for (int i1 = 0; i1 < shape[1]; ++i1) {
    for (int i0 = 0; i0 < shape[0]; ++i0) {
      if (i0) out << ',';
      out << (region.cell_included(i0, i1) ? '1' : '0');
    }
    out << '\n';
  }
  write_json(header, j);
}

PointPattern read_points(const std::filesystem::path& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty point file " + path.string());
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  if (!col.count("x") || (dim == 2 && !col.count("y")))
    throw ConfigError("point file needs columns x" + std::string(dim == 2 ? ",y" : ""));
  const bool marked = col.count("mark") > 0;
  PointPattern p;
  p.dim = dim;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto c = split_csv(line);
    try {
      Vec2 u{std::stod(c.at(col["x"])), dim == 2 ? std::stod(c.at(col["y"])) : 0.0};
      p.locations.push_back(u);
      if (marked) p.marks.push_back(std::stod(c.at(col["mark"])));
    } catch (const std::exception&) {
      throw ConfigError("malformed point row in " + path.string() + ": " + line);
    }
  }
  return p;
}

void write_points(const PointPattern& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "x";
  if (p.dim == 2) out << ",y";
  if (!p.marks.empty()) out << ",mark";
  out << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << fmt17(p.locations[i][0]);
    if (p.dim == 2) out << ',' << fmt17(p.locations[i][1]);
    if (!p.marks.empty()) out << ',' << fmt17(p.marks[i]);
    out << '\n';
  }
}

GriddedField read_field(const std::filesystem::path& csv, const SamplingScheme& scheme,
                        const Region& region) {
  GriddedField f;
  f.nodes = grid_nodes(scheme, region);
  f.values.assign(f.nodes.size(), 0.0);
  std::vector<std::uint8_t> seen(f.nodes.size(), 0);
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  if (!col.count("ix") || !col.count("value") || (scheme.dim == 2 && !col.count("iy")))
    throw ConfigError("field file needs columns ix,iy,value");
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto c = split_csv(line);
    long z0, z1 = 0;
    double v;
    try {
      z0 = std::stol(c.at(col["ix"]));
      if (scheme.dim == 2) z1 = std::stol(c.at(col["iy"]));
      v = std::stod(c.at(col["value"]));
    } catch (const std::exception&) {
      throw ConfigError("malformed field row in " + csv.string() + ": " + line);
    }
    const long i0 = z0 - f.nodes.z0[0], i1 = z1 - f.nodes.z0[1];
    if (i0 < 0 || i1 < 0 || i0 >= f.nodes.n[0] || i1 >= f.nodes.n[1] ||
        !f.nodes.inside[f.nodes.index(static_cast<int>(i0), static_cast<int>(i1))])
      throw ConfigError("field node outside the region: " + line);
    const std::size_t idx = f.nodes.index(static_cast<int>(i0), static_cast<int>(i1));
    f.values[idx] = v;
    seen[idx] = 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (f.nodes.inside[i] && !seen[i]) throw ConfigError("field file misses nodes inside the region");
  return f;
}

void write_field(const GriddedField& f, const std::filesystem::path& csv) {
  std::ofstream out(csv);
  if (!out) throw ConfigError("cannot write " + csv.string());
  out << (f.nodes.scheme.dim == 2 ? "ix,iy,value\n" : "ix,value\n");
  for (int i1 = 0; i1 < f.nodes.n[1]; ++i1)
    for (int i0 = 0; i0 < f.nodes.n[0]; ++i0) {
      const std::size_t i = f.nodes.index(i0, i1);
      if (!f.nodes.inside[i]) continue;
      out << f.nodes.z0[0] + i0;
      if (f.nodes.scheme.dim == 2) out << ',' << f.nodes.z0[1] + i1;
      out << ',' << fmt17(f.values[i]) << '\n';
    }
}

}  // namespace spatspec
