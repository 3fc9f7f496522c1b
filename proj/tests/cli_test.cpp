// Runs the roughclus executable end to end.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "roughclus/pipeline.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace roughclus;
namespace ts = testing_support;

namespace {

struct CliRun {
  int code = -1;
  std::string output;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(ROUGHCLUS_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const Rgb kField{40, 60, 200};
const Rgb kRing{200, 30, 30};

ImageRaster ring_image() {
  return ts::paint(96, 96, kField, {{ts::ring(48, 48, 20, 34), kRing}});
}

// Labels cluster ids by the colour of their seed pixel, read from the report.
std::string labels_for(const fs::path& out_dir, const ImageRaster& img) {
  const ClusterMap map = load_cluster_map(out_dir);
  std::map<ClusterId, std::size_t> first;
  for (std::size_t p = 0; p < map.assignment.size(); ++p) first.emplace(map.assignment[p], p);
  std::string text;
  for (const auto& [id, p] : first) text += std::to_string(id) + (img[p] == kRing ? " ring\n" : " field\n");
  return text;
}

void write_truth(const ImageRaster& img, const fs::path& path) {
  Palette palette{{0, {"field", Rgb{1, 2, 3}}}, {1, {"ring", Rgb{250, 250, 0}}}};
  LabelRaster truth{img.width(), img.height(), std::vector<LabelId>(img.size()), palette};
  for (std::size_t p = 0; p < img.size(); ++p) truth.labels[p] = img[p] == kRing ? 1 : 0;
  save_label_map(truth, path);
  save_palette(palette, palette_path_for(path));
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path());
  return out;
}

}  // namespace

TEST(Cli, TwoColourImageGivesTwoClusters) {
  const fs::path dir = ts::scratch_dir("cli_two");
  save_ppm(ring_image(), dir / "in.ppm");
  const CliRun r = run("cluster " + q(dir / "in.ppm") + " --out " + q(dir / "out"));
  ASSERT_EQ(r.code, 0) << r.output;
  const std::string report = read_file(dir / "out" / files::kClusterReport);
  EXPECT_NE(report.find("\nclusters 2\n"), std::string::npos) << report;
  for (const char* f : {files::kClusterMap, files::kClusterPalette, files::kPerfStats})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = ts::scratch_dir("cli_codes");
  save_ppm(ImageRaster(8, 8, kField), dir / "small.ppm");
  EXPECT_EQ(run("cluster " + q(dir / "small.ppm") + " --grid-n 9 --out " + q(dir / "o")).code, 2);
  EXPECT_EQ(run("cluster " + q(dir / "small.ppm") + " --gamma 1.5 --out " + q(dir / "o")).code, 2);
  EXPECT_EQ(run("cluster " + q(dir / "small.ppm") + " --theta nope").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("cluster " + q(dir / "missing.ppm") + " --out " + q(dir / "o")).code, 3);
  write_file(dir / "bad.ppm", "P3 2 2 255 1 2 3\n");
  EXPECT_EQ(run("cluster " + q(dir / "bad.ppm") + " --out " + q(dir / "o")).code, 4);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ClassifyErrors) {
  const fs::path dir = ts::scratch_dir("cli_classify_errors");
  const ImageRaster img = ring_image();
  save_ppm(img, dir / "in.ppm");
  write_file(dir / "empty.kv", "format=roughclus-rules version=1\ndiscretizer bins=8\n");
  const CliRun empty = run("classify " + q(dir / "in.ppm") + " --rules " + q(dir / "empty.kv") + " --out " + q(dir / "o"));
  EXPECT_EQ(empty.code, 4);
  EXPECT_NE(empty.output.find("no rules"), std::string::npos) << empty.output;

  write_file(dir / "junk.kv", "not a rules file\n");
  EXPECT_EQ(run("classify " + q(dir / "in.ppm") + " --rules " + q(dir / "junk.kv") + " --out " + q(dir / "o")).code, 4);

  ASSERT_EQ(run("cluster " + q(dir / "in.ppm") + " --out " + q(dir / "o")).code, 0);
  write_file(dir / "labels.txt", labels_for(dir / "o", img));
  ASSERT_EQ(run("induce " + q(dir / "in.ppm") + " --labels " + q(dir / "labels.txt") + " --out " + q(dir / "o")).code, 0);
  write_truth(ts::paint(50, 50, kField, {}), dir / "truth_small.ppm");
  const CliRun wrong = run("classify " + q(dir / "in.ppm") + " --rules " + q(dir / "o" / files::kRulesRecords) +
                        " --truth " + q(dir / "truth_small.ppm") + " --out " + q(dir / "o"));
  EXPECT_EQ(wrong.code, 4);
  EXPECT_NE(wrong.output.find("dimensions"), std::string::npos) << wrong.output;
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path dir = ts::scratch_dir("cli_rerun");
  const ImageRaster img = ring_image();
  save_ppm(img, dir / "in.ppm");
  ASSERT_EQ(run("cluster " + q(dir / "in.ppm") + " --out " + q(dir / "a")).code, 0);
  write_file(dir / "labels.txt", labels_for(dir / "a", img));
  for (const char* out : {"a", "b"}) {
    const CliRun r = run("pipeline " + q(dir / "in.ppm") + " --labels " + q(dir / "labels.txt") + " --out " + q(dir / out));
    ASSERT_EQ(r.code, 0) << r.output;
  }
  const auto a = dir_contents(dir / "a");
  EXPECT_EQ(a, dir_contents(dir / "b"));
  EXPECT_TRUE(a.contains(files::kClassified));
}

TEST(Cli, PipelineMatchesStepwiseRun) {
  const fs::path dir = ts::scratch_dir("cli_stepwise");
  const ImageRaster img = ring_image();
  save_ppm(img, dir / "in.ppm");
  const std::string flags = " --theta 0.08 --grid-n 24 --bins 6";
  const std::string cflags = " --theta 0.08 --grid-n 24";
  ASSERT_EQ(run("cluster " + q(dir / "in.ppm") + cflags + " --out " + q(dir / "step")).code, 0);
  write_file(dir / "labels.txt", labels_for(dir / "step", img));
  ASSERT_EQ(run("induce " + q(dir / "in.ppm") + " --bins 6 --labels " + q(dir / "labels.txt") + " --out " + q(dir / "step")).code, 0);
  ASSERT_EQ(run("classify " + q(dir / "in.ppm") + " --rules " + q(dir / "step" / files::kRulesRecords) + " --out " +
                q(dir / "step")).code,
            0);
  ASSERT_EQ(run("pipeline " + q(dir / "in.ppm") + flags + " --labels " + q(dir / "labels.txt") + " --out " + q(dir / "all")).code, 0);
  EXPECT_EQ(dir_contents(dir / "step"), dir_contents(dir / "all"));
}

TEST(Cli, PipelineWithoutLabelsStopsAfterClustering) {
  const fs::path dir = ts::scratch_dir("cli_nolabels");
  save_ppm(ring_image(), dir / "in.ppm");
  const CliRun r = run("pipeline " + q(dir / "in.ppm") + " --out " + q(dir / "o"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("--labels"), std::string::npos) << r.output;
  EXPECT_TRUE(fs::exists(dir / "o" / files::kClusterMap));
  EXPECT_FALSE(fs::exists(dir / "o" / files::kRulesText));

  const CliRun missing = run("pipeline " + q(dir / "in.ppm") + " --labels " + q(dir / "nope.txt") + " --out " + q(dir / "p"));
  EXPECT_EQ(missing.code, 3);
  EXPECT_NE(missing.output.find("nope.txt"), std::string::npos) << missing.output;
  EXPECT_TRUE(fs::exists(dir / "p" / files::kClusterMap));
  EXPECT_FALSE(fs::exists(dir / "p" / files::kRulesText));
}

TEST(Cli, UnknownClusterIdIsNamed) {
  const fs::path dir = ts::scratch_dir("cli_unknown_id");
  save_ppm(ring_image(), dir / "in.ppm");
  ASSERT_EQ(run("cluster " + q(dir / "in.ppm") + " --out " + q(dir / "o")).code, 0);
  write_file(dir / "labels.txt", "0 field\n41 ring\n");
  const CliRun r = run("induce " + q(dir / "in.ppm") + " --labels " + q(dir / "labels.txt") + " --out " + q(dir / "o"));
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.output.find("41"), std::string::npos) << r.output;
}

TEST(Cli, PureClustersGiveCertainRulesOnly) {
  const fs::path dir = ts::scratch_dir("cli_certain");
  const ImageRaster img = ts::paint(64, 64, kField, {{ts::rect(0, 0, 24, 64), kRing}});
  save_ppm(img, dir / "in.ppm");
  ASSERT_EQ(run("cluster " + q(dir / "in.ppm") + " --grid-n 8 --out " + q(dir / "o")).code, 0);
  const ClusterMap map = load_cluster_map(dir / "o");
  ASSERT_EQ(map.cluster_count(), 2u);
  for (std::size_t p = 0; p < img.size(); ++p) ASSERT_EQ(map.assignment[p] == map.assignment[0], img[p] == img[0]);
  write_file(dir / "labels.txt", labels_for(dir / "o", img));
  const CliRun r = run("induce " + q(dir / "in.ppm") + " --labels " + q(dir / "labels.txt") + " --out " + q(dir / "o"));
  ASSERT_EQ(r.code, 0) << r.output;
  const RuleBase base = parse_rules_records(read_file(dir / "o" / files::kRulesRecords));
  std::map<std::string, int> certain;
  for (const Rule& rule : base.rules) {
    EXPECT_EQ(rule.certainty, Certainty::certain) << format_rule(rule);
    ++certain[rule.decision];
  }
  EXPECT_GE(certain["ring"], 1);
  EXPECT_GE(certain["field"], 1);
  EXPECT_NE(read_file(dir / "o" / files::kInduceReport).find("consistency consistent"), std::string::npos);
  const std::string text = read_file(dir / "o" / files::kRulesText);
  EXPECT_NE(text.find("THEN class=ring [certain, support="), std::string::npos) << text;
}

TEST(Cli, SameBinsDifferentLabelsIsInconsistent) {
  // Two shades that a tight theta keeps in separate clusters but that share
  // every hue, saturation and intensity bin.
  const fs::path dir = ts::scratch_dir("cli_inconsistent");
  const Rgb shade_a{200, 30, 30}, shade_b{200, 50, 30};
  ASSERT_EQ(Discretizer{}.bin(rgb_to_hsi(shade_a)), Discretizer{}.bin(rgb_to_hsi(shade_b)));
  const ImageRaster img = ts::paint(64, 64, kField, {{ts::rect(0, 0, 16, 16), shade_a}, {ts::rect(48, 48, 64, 64), shade_b}});
  save_ppm(img, dir / "in.ppm");
  ASSERT_EQ(run("cluster " + q(dir / "in.ppm") + " --grid-n 8 --theta 0.01 --out " + q(dir / "o")).code, 0);
  const ClusterMap map = load_cluster_map(dir / "o");
  const ClusterId a = map.assignment[0];
  const ClusterId b = map.assignment[63 * 64 + 63];
  ASSERT_NE(a, b) << "fixture needs the two squares in separate clusters";
  write_file(dir / "labels.txt", std::to_string(a) + " roof\n" + std::to_string(b) + " car\n");
  const CliRun r = run("induce " + q(dir / "in.ppm") + " --labels " + q(dir / "labels.txt") + " --out " + q(dir / "o"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("inconsistent"), std::string::npos) << r.output;
  EXPECT_NE(read_file(dir / "o" / files::kInduceReport).find("consistency inconsistent"), std::string::npos);
  const RuleBase base = parse_rules_records(read_file(dir / "o" / files::kRulesRecords));
  EXPECT_FALSE(base.rules.empty());
  for (const Rule& rule : base.rules) EXPECT_EQ(rule.certainty, Certainty::possible) << format_rule(rule);
}

TEST(Cli, ConcaveRingIsClassified) {
  const fs::path dir = ts::scratch_dir("cli_ring");
  const ImageRaster img = ring_image();
  save_ppm(img, dir / "in.ppm");
  write_truth(img, dir / "truth.ppm");
  ASSERT_EQ(run("pipeline " + q(dir / "in.ppm") + " --out " + q(dir / "o")).code, 0);
  const ClusterMap map = load_cluster_map(dir / "o");
  EXPECT_EQ(map.cluster_count(), 2u);
  write_file(dir / "labels.txt", labels_for(dir / "o", img));
  const CliRun r = run("pipeline " + q(dir / "in.ppm") + " --labels " + q(dir / "labels.txt") + " --truth " +
                    q(dir / "truth.ppm") + " --out " + q(dir / "o"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("accuracy: 1.0000"), std::string::npos) << r.output;

  const LabelRaster out = decode_label_map(load_ppm(dir / "o" / files::kClassified),
                                           load_palette(dir / "o" / files::kClassifiedPalette));
  std::set<std::string> classes;
  for (std::size_t p = 0; p < img.size(); ++p) {
    ASSERT_NE(out.labels[p], kUnclassified);
    const std::string& name = out.palette.at(out.labels[p]).name;
    classes.insert(name);
    EXPECT_EQ(name, img[p] == kRing ? "ring" : "field");
  }
  EXPECT_EQ(classes.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "o" / files::kObjects));
}

TEST(Cli, Lem2OnDelimitedTable) {
  const fs::path dir = ts::scratch_dir("cli_lem2");
  write_file(dir / "t.csv", "Hue,Int,class\nlow,low,water\nlow,high,water\nhigh,low,land\nhigh,high,land\n");
  const CliRun r = run("lem2 " + q(dir / "t.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output,
            "consistency consistent\n"
            "IF Hue=low THEN class=water [certain, support=2]\n"
            "IF Hue=high THEN class=land [certain, support=2]\n");
}
