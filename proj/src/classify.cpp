#include "roughclus/classify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "roughclus/errors.hpp"

namespace roughclus {

void Discretizer::validate() const {
  if (bins < 1) throw ParameterError("bins must be a positive integer");
}

std::array<int, 3> Discretizer::bin(const HsiPixel& p) const {
  auto to_bin = [this](double normalized) {
    const double scaled = std::floor(static_cast<double>(bins) * normalized);
    return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(bins - 1)));
  };
  return {to_bin(p.h / 360.0), to_bin(p.s), to_bin(p.i)};
}

LabelsFile parse_labels_file(std::string_view text) {
  LabelsFile labels;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    long long id = -1;
    std::string name, extra;
    if (!(fields >> id >> name) || (fields >> extra) || id < 0 || id >= static_cast<long long>(kNoCluster))
      throw DataError("labels line " + std::to_string(line_no) + ": expected `<cluster_id> <class_name>`");
    if (!labels.emplace(static_cast<ClusterId>(id), name).second)
      throw DataError("labels line " + std::to_string(line_no) + ": cluster " + std::to_string(id) +
                      " labeled twice");
  }
  return labels;
}

LabelsFile load_labels_file(const std::filesystem::path& path) { return parse_labels_file(read_file(path)); }

TrainingTable build_decision_table(std::span<const HsiPixel> hsi, const ClusterMap& map, const LabelsFile& labels,
                                   const Discretizer& disc) {
  disc.validate();
  if (hsi.size() != map.assignment.size()) throw DataError("cluster map size does not match image");
  for (const auto& [id, name] : labels) {
    if (id >= map.clusters.size()) throw DataError("labels file references unknown cluster id " + std::to_string(id));
  }
  if (labels.empty()) throw DataError("no labeled clusters");
  std::set<std::string> classes;
  for (const auto& [id, name] : labels) classes.insert(name);
  if (classes.size() < 2) throw DataError("training set has a single class; at least two are required");

  TrainingTable out{DecisionTable({Discretizer::kAttributeNames.begin(), Discretizer::kAttributeNames.end()}), {}};
  for (const ClusterInfo& c : map.clusters) {
    if (!labels.contains(c.id)) out.unlabeled_clusters.push_back(c.id);
  }
  std::vector<std::string> values(3);
  for (std::size_t p = 0; p < hsi.size(); ++p) {
    const auto it = labels.find(map.assignment[p]);
    if (it == labels.end()) continue;
    const auto bins = disc.bin(hsi[p]);
    for (std::size_t k = 0; k < 3; ++k) values[k] = std::to_string(bins[k]);
    out.table.add_row(values, it->second);
  }
  return out;
}

namespace {

struct CompiledRule {
  std::vector<std::pair<std::size_t, int>> conditions;  // (channel, bin)
  std::size_t class_index = 0;
  bool certain = true;
  double strength = 0.0;
};

std::size_t channel_of(const std::string& attribute) {
  for (std::size_t k = 0; k < Discretizer::kAttributeNames.size(); ++k) {
    if (attribute == Discretizer::kAttributeNames[k]) return k;
  }
  throw DataError("rule uses unknown attribute `" + attribute + "`");
}

struct CompiledRules {
  std::vector<std::string> classes;
  std::vector<CompiledRule> rules;
};

CompiledRules compile(std::span<const Rule> rules) {
  if (rules.empty()) throw DataError("rule base is empty");
  CompiledRules out;
  out.classes = rule_classes(rules);
  for (const Rule& r : rules) {
    if (r.conditions.empty()) throw DataError("rule without conditions");
    CompiledRule c;
    for (const Condition& cond : r.conditions) {
      int value = 0;
      try {
        std::size_t used = 0;
        value = std::stoi(cond.value, &used);
        if (used != cond.value.size()) throw std::invalid_argument(cond.value);
      } catch (const std::exception&) {
        throw DataError("rule condition value `" + cond.value + "` is not a bin index");
      }
      c.conditions.emplace_back(channel_of(cond.attribute), value);
    }
    c.class_index = static_cast<std::size_t>(std::find(out.classes.begin(), out.classes.end(), r.decision) -
                                             out.classes.begin());
    c.certain = r.certainty == Certainty::certain;
    c.strength = static_cast<double>(r.strength);
    out.rules.push_back(std::move(c));
  }
  return out;
}

// Returns a class index, or classes.size() for unclassified.
std::size_t classify_bins(const std::array<int, 3>& bins, const CompiledRules& compiled) {
  const std::size_t n_classes = compiled.classes.size();
  std::vector<double> certain_votes(n_classes, 0.0);
  std::vector<double> possible_votes(n_classes, 0.0);
  std::vector<double> partial_votes(n_classes, 0.0);
  bool any_certain = false;
  bool any_possible = false;

  for (const CompiledRule& r : compiled.rules) {
    std::size_t matched = 0;
    for (const auto& [channel, value] : r.conditions) matched += bins[channel] == value ? 1 : 0;
    if (matched == r.conditions.size()) {
      (r.certain ? certain_votes : possible_votes)[r.class_index] += r.strength;
      (r.certain ? any_certain : any_possible) = true;
    } else {
      partial_votes[r.class_index] +=
          r.strength * static_cast<double>(matched) / static_cast<double>(r.conditions.size());
    }
  }

  // Strictly greater keeps the first class in rule order on ties.
  auto argmax = [n_classes](const std::vector<double>& votes) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n_classes; ++k) {
      if (votes[k] > votes[best]) best = k;
    }
    return best;
  };
  if (any_certain) return argmax(certain_votes);
  if (any_possible) return argmax(possible_votes);
  const std::size_t best = argmax(partial_votes);
  return partial_votes[best] > 0.0 ? best : n_classes;
}

}  // namespace

std::vector<std::string> rule_classes(std::span<const Rule> rules) {
  std::vector<std::string> classes;
  for (const Rule& r : rules) {
    if (std::find(classes.begin(), classes.end(), r.decision) == classes.end()) classes.push_back(r.decision);
  }
  return classes;
}

std::optional<std::string> classify_pixel(const HsiPixel& p, std::span<const Rule> rules, const Discretizer& disc) {
  disc.validate();
  const CompiledRules compiled = compile(rules);
  const std::size_t k = classify_bins(disc.bin(p), compiled);
  if (k == compiled.classes.size()) return std::nullopt;
  return compiled.classes[k];
}

Palette class_palette(std::span<const std::string> class_names) {
  Palette palette;
  std::set<Rgb> taken{Rgb{0, 0, 0}};
  for (std::size_t k = 0; k < class_names.size(); ++k) {
    // FNV-1a of the name picks the color, so a class keeps its color across runs.
    std::uint32_t hash = 2166136261u;
    for (unsigned char ch : class_names[k]) {
      hash ^= ch;
      hash *= 16777619u;
    }
    Rgb color{static_cast<std::uint8_t>(64 + (hash & 0xFF) % 192), static_cast<std::uint8_t>(64 + ((hash >> 8) & 0xFF) % 192),
              static_cast<std::uint8_t>(64 + ((hash >> 16) & 0xFF) % 192)};
    while (taken.contains(color)) color.b = static_cast<std::uint8_t>(color.b + 37);
    taken.insert(color);
    palette.emplace(static_cast<LabelId>(k), PaletteEntry{class_names[k], color});
  }
  return palette;
}

LabelRaster classify_image(const ImageRaster& image, std::span<const Rule> rules, const Discretizer& disc) {
  disc.validate();
  const CompiledRules compiled = compile(rules);
  if (compiled.classes.size() >= kUnclassified) throw DataError("too many classes for a label map");
  LabelRaster out{image.width(), image.height(), std::vector<LabelId>(image.size()), class_palette(compiled.classes)};
  // The result depends only on the bin triple, so each triple is decided once.
  std::map<std::array<int, 3>, LabelId> decided;
  for (std::size_t p = 0; p < image.size(); ++p) {
    const auto bins = disc.bin(rgb_to_hsi(image[p]));
    auto it = decided.find(bins);
    if (it == decided.end()) {
      const std::size_t k = classify_bins(bins, compiled);
      const LabelId id = k == compiled.classes.size() ? kUnclassified : static_cast<LabelId>(k);
      it = decided.emplace(bins, id).first;
    }
    out.labels[p] = it->second;
  }
  return out;
}

namespace {

const std::string* name_of(const LabelRaster& raster, std::size_t p) {
  const LabelId id = raster.labels[p];
  if (id == kUnclassified) return nullptr;
  return &raster.palette.at(id).name;
}

}  // namespace

double accuracy(const LabelRaster& predicted, const LabelRaster& truth, const std::vector<bool>& mask) {
  if (predicted.width != truth.width || predicted.height != truth.height)
    throw DataError("predicted and truth label maps differ in dimensions");
  predicted.validate();
  truth.validate();
  if (mask.size() != truth.labels.size()) throw DataError("mask size does not match label map");
  std::size_t total = 0;
  std::size_t agree = 0;
  for (std::size_t p = 0; p < truth.labels.size(); ++p) {
    if (!mask[p]) continue;
    ++total;
    const std::string* a = name_of(predicted, p);
    const std::string* b = name_of(truth, p);
    if ((!a && !b) || (a && b && *a == *b)) ++agree;
  }
  return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total);
}

double accuracy(const LabelRaster& predicted, const LabelRaster& truth) {
  return accuracy(predicted, truth, std::vector<bool>(truth.labels.size(), true));
}

double unclassified_fraction(const LabelRaster& labels) {
  if (labels.labels.empty()) return 0.0;
  const auto n = std::count(labels.labels.begin(), labels.labels.end(), kUnclassified);
  return static_cast<double>(n) / static_cast<double>(labels.labels.size());
}

std::vector<ObjectLabel> object_labels(const ClusterMap& map, const LabelRaster& labels) {
  if (map.width != labels.width || map.height != labels.height)
    throw DataError("cluster map and label map differ in dimensions");
  std::vector<std::map<LabelId, std::size_t>> counts(map.clusters.size());
  for (std::size_t p = 0; p < map.assignment.size(); ++p) ++counts.at(map.assignment[p])[labels.labels[p]];
  std::vector<ObjectLabel> out;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    ObjectLabel obj{static_cast<ClusterId>(c), 0, std::nullopt, 0};
    LabelId best = kUnclassified;
    for (const auto& [id, n] : counts[c]) {
      obj.pixels += n;
      if (n > obj.majority_pixels) {
        obj.majority_pixels = n;
        best = id;
      }
    }
    if (best != kUnclassified) obj.majority = labels.palette.at(best).name;
    out.push_back(std::move(obj));
  }
  return out;
}

}  // namespace roughclus
