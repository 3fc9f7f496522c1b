#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "roughclus/boundary_refine.hpp"
#include "roughclus/classify.hpp"
#include "roughclus/grid_cluster.hpp"

namespace roughclus {

/// Everything a pipeline run depends on. Defaults are deterministic.
struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path out_dir = "out";
  ClusteringParams clustering;
  Discretizer disc;
  bool refine = true;

  void validate() const;
};

/// Parses "auto" or a number in [0, 1].
std::optional<double> parse_gamma(const std::string& text);

// Files written into RunConfig::out_dir.
namespace files {
inline constexpr const char* kClusterMap = "clusters.ppm";
inline constexpr const char* kClusterPalette = "clusters.pal";
inline constexpr const char* kClusterReport = "cluster_report.txt";
inline constexpr const char* kPerfStats = "perf_stats.txt";
inline constexpr const char* kRulesText = "rules.txt";
inline constexpr const char* kRulesRecords = "rules.kv";
inline constexpr const char* kInduceReport = "induce_report.txt";
inline constexpr const char* kClassified = "classified.ppm";
inline constexpr const char* kClassifiedPalette = "classified.pal";
inline constexpr const char* kObjects = "objects.txt";
inline constexpr const char* kCoverage = "coverage.txt";
}  // namespace files

struct ClusterOutcome {
  ClusterMap map;
  Grid grid;
  PerfStats stats;
  std::optional<RefineStats> refine;
};

/// Rough clustering plus optional refinement, without touching the filesystem.
ClusterOutcome cluster_image(const ImageRaster& image, const RunConfig& config);

/// Deterministic, distinct, non-black color per cluster id.
Palette cluster_palette(std::size_t cluster_count);

ClusterOutcome cmd_cluster(const RunConfig& config, std::ostream& log);

struct InduceOutcome {
  std::vector<Rule> rules;
  bool consistent = true;
  std::size_t rows = 0;
};

InduceOutcome cmd_induce(const RunConfig& config, const std::filesystem::path& labels_path, std::ostream& log);

struct ClassifyOutcome {
  LabelRaster labels;
  double unclassified = 0.0;
  std::optional<double> accuracy;          // all pixels
  std::optional<double> labeled_accuracy;  // pixels labeled in the truth map
};

/// Classifies config.input with the rule records at rules_path. truth is a
/// palette-colored PPM with a `.pal` sidecar next to it.
ClassifyOutcome cmd_classify(const RunConfig& config, const std::filesystem::path& rules_path,
                             const std::optional<std::filesystem::path>& truth, std::ostream& log);

/// Runs cluster, induce and classify in sequence. Without a labels file it
/// stops after clustering and returns false.
bool cmd_pipeline(const RunConfig& config, const std::optional<std::filesystem::path>& labels_path,
                  const std::optional<std::filesystem::path>& truth, std::ostream& log);

/// Reconstructs the per-pixel cluster assignment written by cmd_cluster.
ClusterMap load_cluster_map(const std::filesystem::path& out_dir);

}  // namespace roughclus
