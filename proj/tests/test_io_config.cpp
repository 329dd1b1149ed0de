#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "spatspec/config.hpp"
#include "spatspec/io.hpp"

using namespace spatspec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("spatspec_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

Region masked() {
  std::vector<std::uint8_t> mask(8 * 6, 1);
  mask[3] = mask[17] = 0;
  return Region(Box{2, {0, 0}, {16, 12}}, Vec2{2, 2}, mask);
}

}  // namespace

TEST(Io, Fmt17RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
    EXPECT_EQ(std::stod(fmt17(v)), v);
}

TEST(Io, RegionRoundTrip) {
  const fs::path d = fresh_dir("region");
  const Region r = masked();
  write_region(r, d / "region.json");
  const Region s = read_region(d / "region.json");
  EXPECT_EQ(s.hash(), r.hash());
  EXPECT_EQ(s.mask(), r.mask());
  EXPECT_DOUBLE_EQ(s.area(), r.area());
  const Region full = Region::rectangle(Box{1, {-3, 0}, {7, 1}}, Vec2{0.5, 1});
  write_region(full, d / "line.json");
  EXPECT_EQ(read_region(d / "line.json").hash(), full.hash());
}

TEST(Io, PointsRoundTrip) {
  const fs::path d = fresh_dir("points");
  PointPattern p{2, {{0.1, 0.2}, {3.0 / 7.0, 11.25}}, {}};
  write_points(p, d / "a.csv");
  const PointPattern q = read_points(d / "a.csv", 2);
  EXPECT_EQ(q.locations, p.locations);
  EXPECT_TRUE(q.marks.empty());
  p.marks = {1.5, -0.25};
  write_points(p, d / "b.csv");
  EXPECT_EQ(read_points(d / "b.csv", 2).marks, p.marks);
  write_text(d / "bad.csv", "x,y\n1,2\nnope,3\n");
  EXPECT_THROW(read_points(d / "bad.csv", 2), ConfigError);
  EXPECT_THROW(read_points(d / "missing.csv", 2), ConfigError);
}

TEST(Io, FieldRoundTrip) {
  const fs::path d = fresh_dir("field");
  const Region r = masked();
  const auto s = SamplingScheme::grid(2, {2, 2}, {1, 1});
  GriddedField f = constant_field(s, r, 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.nodes.inside[i]) f.values[i] = 0.1 * static_cast<double>(i) - 1.0 / 3.0;
  write_field(f, d / "f.csv");
  const GriddedField g = read_field(d / "f.csv", s, r);
  EXPECT_EQ(g.values, f.values);
  EXPECT_EQ(g.nodes.count, f.nodes.count);
}

TEST(Io, SchemeJson) {
  const auto s = SamplingScheme::grid(2, {10, 15}, {0, 3});
  const SamplingScheme t = scheme_from_json(scheme_to_json(s), 2);
  EXPECT_EQ(t.delta, s.delta);
  EXPECT_EQ(t.offset, s.offset);
  EXPECT_FALSE(scheme_from_json(scheme_to_json(SamplingScheme::continuous(2)), 2).is_grid());
}

TEST(Config, ContentHash) {
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(content_hash("abc").size(), 16u);
}

TEST(Config, ModelJsonRoundTrip) {
  ColocationModel c;
  c.alpha = {0.3, -0.7};
  c.matern.nu = 1.25;
  const ModelConfig back = model_from_json(model_to_json(c), 2);
  const auto& cb = std::get<ColocationModel>(back);
  EXPECT_EQ(cb.alpha, c.alpha);
  EXPECT_EQ(cb.matern.nu, 1.25);
  EXPECT_EQ(cb.grids[1].offset, c.grids[1].offset);
  const ModelConfig sp = model_from_json(json{{"model", "shifted-pair"}, {"tau", {1.5, 2.0}}}, 2);
  EXPECT_EQ(std::get<ShiftedPairModel>(sp).tau, (Vec2{1.5, 2.0}));
  EXPECT_THROW(model_from_json(json{{"model", "nonsense"}}, 2), ConfigError);
  EXPECT_THROW(model_from_json(json{{"model", "poisson"}, {"lambda", -1.0}}, 2), ConfigError);
}

TEST(Config, KgridSpecifications) {
  const Region r = Region::rectangle(Box{2, {0, 0}, {100, 50}}, Vec2{1, 1});
  const std::vector<SamplingScheme> grids{SamplingScheme::continuous(2), SamplingScheme::grid(2, {5, 5})};
  const auto def = kgrid_from_json(json::object(), r, grids, false);
  EXPECT_DOUBLE_EQ(def.step()[0], 0.01);
  EXPECT_LE(def.half()[0] * def.step()[0], 0.1 + 1e-12);
  EXPECT_LE(def.half()[1] * def.step()[1], 0.1 + 1e-12);
  const auto clipped = kgrid_from_json(json{{"kmax", {0.3, 0.3}}}, r, grids, false);
  EXPECT_EQ(clipped.half(), def.half());
  const auto full = kgrid_from_json(json{{"kmax", {0.3, 0.3}}}, r, grids, true);
  EXPECT_EQ(full.half()[0], 30);
  EXPECT_THROW(kgrid_from_json(json::object(), r, {SamplingScheme::continuous(2)}, false), ConfigError);
  const auto pts = kgrid_from_json(json{{"points", {{0.1, 0.0}, {-0.1, 0.0}}}}, r, grids, false);
  EXPECT_EQ(pts.size(), 2u);
  const auto reg = kgrid_from_json(json{{"step", {0.01, 0.02}}, {"half", 3}}, r, grids, false);
  EXPECT_EQ(reg.size(), 49u);
}

TEST(Config, LoadRunConfigAndProcesses) {
  const fs::path d = fresh_dir("run");
  const Region r = Region::rectangle(Box{2, {0, 0}, {40, 30}}, Vec2{1, 1});
  write_region(r, d / "region.json");
  write_points(PointPattern{2, {{1, 1}, {20, 15}}, {}}, d / "pts.csv");
  const auto s = SamplingScheme::grid(2, {2, 2}, {1, 1});
  write_field(constant_field(s, r, 2.0), d / "fld.csv");
  write_json(d / "fld.json", json{{"scheme", scheme_to_json(s)}});
  const json cfg = {{"region", "region.json"},
                    {"tapers", {{"bandwidth", 0.2}}},
                    {"seed", 7},
                    {"processes",
                     {{{"label", "pts"}, {"path", "pts.csv"}},
                      {{"label", "fld"}, {"type", "field"}, {"path", "fld.csv"}},
                      {{"label", "sim"}, {"model", {{"model", "shifted-pair"}}}}}}};
  write_json(d / "run.json", cfg);
  const RunConfig rc = load_run_config(d / "run.json");
  EXPECT_EQ(rc.region->hash(), r.hash());
  EXPECT_EQ(rc.tapers.bandwidth, 0.2);
  EXPECT_EQ(rc.hash, file_hash(d / "run.json"));
  const auto procs = load_processes(rc);
  ASSERT_EQ(procs.size(), 4u);
  EXPECT_EQ(procs[0].label, "pts");
  EXPECT_FALSE(procs[1].is_points());
  EXPECT_EQ(procs[2].label, "sim.A");
  EXPECT_EQ(procs[3].label, "sim.B");
  const auto again = load_processes(load_run_config(d / "run.json"));
  EXPECT_EQ(std::get<PointPattern>(again[2].data).locations, std::get<PointPattern>(procs[2].data).locations);
}

TEST(Config, RunConfigErrors) {
  const fs::path d = fresh_dir("errors");
  write_region(Region::rectangle(Box{2, {0, 0}, {10, 10}}, Vec2{1, 1}), d / "region.json");
  write_points(PointPattern{2, {{1, 1}}, {}}, d / "pts.csv");
  auto load = [&](const json& j) {
    write_json(d / "run.json", j);
    return load_processes(load_run_config(d / "run.json"));
  };
  const json base = {{"region", "region.json"}, {"tapers", {{"bandwidth", 0.3}}}};
  json dup = base;
  dup["processes"] = {{{"label", "a"}, {"path", "pts.csv"}}, {{"label", "a"}, {"path", "pts.csv"}}};
  EXPECT_THROW(load(dup), ConfigError);
  json missing = base;
  missing["processes"] = {{{"label", "a"}, {"path", "nowhere.csv"}}};
  EXPECT_THROW(load(missing), ConfigError);
  json empty = base;
  empty["processes"] = json::array();
  EXPECT_THROW(load(empty), ConfigError);
  json oracle = base;
  oracle["flags"] = {{"oracle_lambda", true}};
  oracle["processes"] = {{{"label", "a"}, {"path", "pts.csv"}}};
  EXPECT_THROW(load(oracle), ConfigError);
  json noscheme = base;
  write_text(d / "lone.csv", "ix,iy,value\n0,0,1\n");
  noscheme["processes"] = {{{"label", "f"}, {"type", "field"}, {"path", "lone.csv"}}};
  EXPECT_THROW(load(noscheme), ConfigError);
  EXPECT_THROW(load_run_config(d / "absent.json"), ConfigError);
}
