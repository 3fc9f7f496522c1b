#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roughclus/colorspace.hpp"
#include "roughclus/grid_cluster.hpp"
#include "roughclus/raster_io.hpp"
#include "roughclus/roughset.hpp"

namespace roughclus {

/// Equal-width binning of H in [0, 360), S and I in [0, 1].
struct Discretizer {
  int bins = 8;

  static constexpr std::array<const char*, 3> kAttributeNames{"h_bin", "s_bin", "i_bin"};

  void validate() const;
  std::array<int, 3> bin(const HsiPixel& p) const;
};

/// cluster id -> class name. Clusters absent from the map are not used for training.
using LabelsFile = std::map<ClusterId, std::string>;

LabelsFile parse_labels_file(std::string_view text);
LabelsFile load_labels_file(const std::filesystem::path& path);

struct TrainingTable {
  DecisionTable table;
  std::vector<ClusterId> unlabeled_clusters;
};

/// One example per pixel of every labeled cluster, in raster order.
TrainingTable build_decision_table(std::span<const HsiPixel> hsi, const ClusterMap& map, const LabelsFile& labels,
                                   const Discretizer& disc);

/// Classifies one pixel. std::nullopt means unclassified.
std::optional<std::string> classify_pixel(const HsiPixel& p, std::span<const Rule> rules, const Discretizer& disc);

/// Deterministic, distinct, non-black display color for each class name.
Palette class_palette(std::span<const std::string> class_names);

/// Class names in first-appearance order among the rules.
std::vector<std::string> rule_classes(std::span<const Rule> rules);

LabelRaster classify_image(const ImageRaster& image, std::span<const Rule> rules, const Discretizer& disc);

/// Fraction of pixels whose class names agree; two unclassified pixels agree.
double accuracy(const LabelRaster& predicted, const LabelRaster& truth);

/// Accuracy restricted to pixels where mask is true.
double accuracy(const LabelRaster& predicted, const LabelRaster& truth, const std::vector<bool>& mask);

double unclassified_fraction(const LabelRaster& labels);

struct ObjectLabel {
  ClusterId cluster = 0;
  std::size_t pixels = 0;
  std::optional<std::string> majority;  // nullopt when most pixels are unclassified
  std::size_t majority_pixels = 0;
};

/// Majority class per cluster of a clustering of the same image.
std::vector<ObjectLabel> object_labels(const ClusterMap& map, const LabelRaster& labels);

// Rule files. The text form is for people; the record form round-trips.
std::string format_rule(const Rule& rule);
std::string encode_rules_text(std::span<const Rule> rules);
std::string encode_rules_records(std::span<const Rule> rules, const Discretizer& disc);

struct RuleBase {
  Discretizer disc;
  std::vector<Rule> rules;
};

RuleBase parse_rules_records(std::string_view text);

}  // namespace roughclus
