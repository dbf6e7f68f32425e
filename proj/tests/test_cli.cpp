#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "io.hpp"

using namespace opgrowth;
using namespace opgrowth::cli;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("opgrowth_test_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

json manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return json::parse(in);
}

RunConfig run(const std::string& command, json j, const std::string& name, int jobs = 1) {
  j["output"] = scratch(name).string();
  RunConfig c = parse_config(j);
  run_command(command, c, jobs);
  return c;
}

}  // namespace

TEST(Config, UnknownKeysAreRejectedWithTheirPath) {
  for (json bad : {json{{"model", {{"type", "harmonic"}, {"omgea", 1.0}}}},
                   json{{"model", {{"type", "harmonic"}}}, {"lanczos", {{"nmax", 3}}}},
                   json{{"model", {{"type", "harmonic"}}}, {"colour", "red"}}}) {
    try {
      parse_config(bad);
      FAIL() << bad.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_config);
      EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos);
    }
  }
  EXPECT_THROW(parse_config(json{{"model", {{"type", "box1d"}, {"dim", 0}}}}), Error);
  EXPECT_THROW(parse_config(json{{"model", {{"type", "spaceship"}}}}), Error);
}

TEST(Config, ExpandedFormRoundTrips) {
  const char* dir = std::getenv("OPGROWTH_CONFIG_DIR");
  ASSERT_NE(dir, nullptr);
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    const RunConfig c = load_config(entry.path());
    const json once = to_json(c);
    EXPECT_EQ(to_json(parse_config(once)), once) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 10);
}

TEST(Io, Sha256KnownDigest) {
  const auto p = scratch("abc.txt");
  std::ofstream(p) << "abc";
  EXPECT_EQ(sha256_file(p), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(Commands, ModelWritesSpectrumAndOperator) {
  auto c = run("model", {{"model", {{"type", "harmonic"}, {"dim", 4}}}}, "harm4");
  const auto spec = read_csv(c.output / "spectrum.csv");
  ASSERT_EQ(spec.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(spec[k][0], k + 1);
    EXPECT_NEAR(spec[k][1], k + 0.5, 1e-14);
  }

  c = run("model", {{"model", {{"type", "box1d"}, {"dim", 3}, {"length", 1.0}}}}, "box3");
  bool found = false;
  for (const auto& r : read_csv(c.output / "operator.csv"))
    if (r[0] == 1 && r[1] == 2) {
      found = true;
      EXPECT_NEAR(r[2], 16.0 / (9.0 * std::numbers::pi * std::numbers::pi), 1e-12);
    }
  EXPECT_TRUE(found);
  const json m = manifest(c.output);
  EXPECT_EQ(m["command"], "model");
  EXPECT_EQ(m["files"].size(), 2u);
  EXPECT_EQ(m["files"][0]["sha256"], sha256_file(c.output / "spectrum.csv"));
}

TEST(Commands, HarmonicLanczosClosesAfterOneStep) {
  auto c = run("lanczos", {{"model", {{"type", "harmonic"}, {"dim", 50}}}, {"lanczos", {{"n_max", 10}}}},
               "harm_lanczos");
  const auto rows = read_csv(c.output / "lanczos.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0][0], 1.0);
  EXPECT_NEAR(rows[0][1], 1.0, 1e-12);
  EXPECT_FALSE(manifest(c.output)["warnings"].empty());
}

TEST(Commands, DynamicsStartsFromTheSeed) {
  auto c = run("dynamics",
               {{"model", {{"type", "random"}, {"dim", 200}, {"bandwidth", 50.0}}},
                {"lanczos", {{"n_max", 30}}},
                {"dynamics", {{"t_max", 0.5}, {"t_points", 11}}}},
               "dyn");
  const auto ck = read_csv(c.output / "complexity.csv");
  const auto corr = read_csv(c.output / "correlation.csv");
  ASSERT_EQ(ck.size(), 11u);
  ASSERT_EQ(corr.size(), 11u);
  EXPECT_EQ(ck[0][0], 0.0);
  EXPECT_NEAR(ck[0][1], 0.0, 1e-14);
  EXPECT_NEAR(corr[0][1], 1.0, 1e-12);
  for (std::size_t i = 1; i < ck.size(); ++i) EXPECT_GE(ck[i][1], ck[i - 1][1] - 1e-12);
}

TEST(Commands, OutputsAreReproducibleAcrossRunsAndThreadCounts) {
  const json j{{"model", {{"type", "random"}, {"dim", 150}, {"bandwidth", 100.0},
                          {"structure", {{"class", "exponential"}, {"parameter", 0.5}}}}},
               {"lanczos", {{"n_max", 20}, {"seeds", 4}}},
               {"seed", 7}};
  auto a = run("lanczos", j, "rep_a", 1);
  auto b = run("lanczos", j, "rep_b", 1);
  auto c = run("lanczos", j, "rep_c", 4);
  for (const char* f : {"lanczos.csv", "growth_report.json"}) {
    EXPECT_EQ(sha256_file(a.output / f), sha256_file(b.output / f)) << f;
    EXPECT_EQ(sha256_file(a.output / f), sha256_file(c.output / f)) << f;
  }
  json other = j;
  other["seed"] = 8;
  auto d = run("lanczos", other, "rep_d", 1);
  EXPECT_NE(sha256_file(a.output / "lanczos.csv"), sha256_file(d.output / "lanczos.csv"));
}

TEST(Commands, StructureRejectsAnEmptyWindow) {
  const json base{{"model", {{"type", "xxz"}, {"sites", 8}, {"j2", 0.5}}}};
  json inverted = base;
  inverted["structure"] = {{"ebar", {1.0, -1.0}}};
  EXPECT_THROW(run("structure", inverted, "empty1"), Error);
  json far = base;
  far["structure"] = {{"ebar", {100.0, 101.0}}};
  EXPECT_THROW(run("structure", far, "empty2"), Error);
}

TEST(Commands, BundledConfigsLoad) {
  const char* dir = std::getenv("OPGROWTH_CONFIG_DIR");
  ASSERT_NE(dir, nullptr);
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") {
      EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    }
}
