#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spatspec/cli.hpp"
#include "spatspec/io.hpp"

using namespace spatspec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "spatspec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Mean coherence over the rows of coherence.csv for the pair (0, 1).
double mean_coherence(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  double s = 0.0;
  int n = 0;
  while (std::getline(in, line)) {
    const auto f = split_csv(line);
    if (f[2] != "0" || f[3] != "1") continue;
    const double r = std::stod(f[4]);
    if (std::isnan(r)) continue;
    s += r;
    ++n;
  }
  return n ? s / n : std::nan("");
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "spatspec_cli";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_region(Region::rectangle(Box{2, {0, 0}, {40, 30}}, Vec2{1, 1}), dir_ / "region.json");
    write_region(Region::rectangle(Box{2, {0, 0}, {30, 30}}, Vec2{1, 1}), dir_ / "other.json");
    write_json(dir_ / "pair.json", {{"region", "region.json"},
                                    {"model", "shifted-pair"},
                                    {"lambda", 0.2},
                                    {"tau", {2.0, 1.0}},
                                    {"truth_kgrid", {{"kmax", {0.1, 0.1}}}}});
    ASSERT_EQ(run({"tapers", "--region", (dir_ / "region.json").string(), "--bandwidth", "0.15", "--out",
                   (dir_ / "tapers").string()}),
              0);
    ASSERT_EQ(run({"simulate", "--config", (dir_ / "pair.json").string(), "--seed", "5", "--truth", "--out",
                   (dir_ / "sim").string()}),
              0);
    ASSERT_EQ(run({"simulate", "--model", "white-noise", "--region", (dir_ / "region.json").string(), "--seed",
                   "6", "--out", (dir_ / "wn").string()}),
              0);
  }

  static fs::path write_run(const std::string& name, const json& processes, const std::string& tapers = "tapers") {
    const json cfg{{"region", "region.json"},
                   {"tapers", {{"dir", tapers}}},
                   {"kgrid", {{"kmax", {0.1, 0.1}}}},
                   {"processes", processes}};
    write_json(dir_ / name, cfg);
    return dir_ / name;
  }

  static inline fs::path dir_;
};

}  // namespace

TEST_F(CliPipeline, SimulateWritesOutputs) {
  for (const char* f : {"region.json", "A.csv", "B.csv", "truth.csv", "simulation.json"})
    EXPECT_TRUE(fs::exists(dir_ / "sim" / f)) << f;
  EXPECT_TRUE(fs::exists(dir_ / "wn" / "field.json"));
  const json meta = read_json(dir_ / "sim" / "simulation.json");
  EXPECT_EQ(meta.at("seed").get<int>(), 5);
  EXPECT_EQ(meta.at("truth").at("method").get<std::string>(), "closed-form");
}

TEST_F(CliPipeline, MixedEstimateIsReproducible) {
  const std::string field = "wn/field.csv";
  const fs::path cfg = write_run("run.json", {{{"label", "A"}, {"path", "sim/A.csv"}},
                                              {{"label", "B"}, {"path", "sim/B.csv"}},
                                              {{"label", "Y"}, {"type", "field"}, {"path", field}}});
  ASSERT_EQ(run({"estimate", "--config", cfg.string(), "--out", (dir_ / "est1").string()}), 0);
  ASSERT_EQ(run({"estimate", "--config", cfg.string(), "--out", (dir_ / "est2").string()}), 0);
  for (const char* f : {"spectral_matrix.csv", "coherence.csv", "group_delay.csv", "metadata.json", "provenance.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / "est1" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "est1" / f), slurp(dir_ / "est2" / f)) << f;
  }
  const json meta = read_json(dir_ / "est1" / "metadata.json");
  EXPECT_EQ(meta.at("P").get<int>(), 3);
  const json prov = read_json(dir_ / "est1" / "provenance.json");
  EXPECT_TRUE(prov.at("input_hashes").contains("sim/A.csv"));
  EXPECT_TRUE(prov.at("input_hashes").contains("tapers/metadata.json"));
  EXPECT_EQ(prov.at("region_hash"), meta.at("region_hash"));
  // The shifted copy is strongly coherent with its source at low wavenumbers.
  EXPECT_GT(mean_coherence(dir_ / "est1" / "coherence.csv"), 0.5);
}

TEST_F(CliPipeline, MixedTapersNeedOptIn) {
  const fs::path cfg = write_run("mixed.json", {{{"label", "A"}, {"path", "sim/A.csv"}},
                                                {{"label", "A2"}, {"path", "sim/A.csv"}, {"taper_offset", 1}}});
  EXPECT_EQ(run({"estimate", "--config", cfg.string(), "--out", (dir_ / "mixed").string()}), 2);
  ASSERT_EQ(run({"estimate", "--config", cfg.string(), "--allow-mixed-tapers", "--out", (dir_ / "mixed").string()}),
            0);
  const fs::path same = write_run("same.json", {{{"label", "A"}, {"path", "sim/A.csv"}},
                                                {{"label", "A2"}, {"path", "sim/A.csv"}}});
  ASSERT_EQ(run({"estimate", "--config", same.string(), "--out", (dir_ / "same").string()}), 0);
  EXPECT_NEAR(mean_coherence(dir_ / "same" / "coherence.csv"), 1.0, 1e-9);
  EXPECT_LT(mean_coherence(dir_ / "mixed" / "coherence.csv"), 0.9);
}

TEST_F(CliPipeline, ErrorsExitWithTwo) {
  ASSERT_EQ(run({"tapers", "--region", (dir_ / "other.json").string(), "--bandwidth", "0.15", "--out",
                 (dir_ / "other_tapers").string()}),
            0);
  const fs::path cfg = write_run("wrong.json", {{{"label", "A"}, {"path", "sim/A.csv"}}}, "other_tapers");
  EXPECT_EQ(run({"estimate", "--config", cfg.string(), "--out", (dir_ / "wrong").string()}), 2);
  EXPECT_EQ(run({"estimate", "--config", (dir_ / "absent.json").string(), "--out", (dir_ / "x").string()}), 2);
  EXPECT_EQ(run({"validate", "no-such-suite"}), 2);
  EXPECT_EQ(run({"estimate", "--bogus"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"simulate", "--model", "poisson", "--out", (dir_ / "noregion").string()}), 2);
  EXPECT_EQ(run({"--version"}), 0);
}

TEST_F(CliPipeline, ValidateWritesReport) {
  const fs::path report = dir_ / "nudft.json";
  ASSERT_EQ(run({"validate", "nudft", "--out", report.string()}), 0);
  const json r = read_json(report);
  EXPECT_EQ(r.at("suite").get<std::string>(), "nudft");
  EXPECT_FALSE(r.at("checks").empty());
  EXPECT_EQ(run({"validate", "poisson-flat", "--reps", "-1"}), 2);
}
