#include "roughclus/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "roughclus/errors.hpp"

namespace roughclus {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  disc.validate();
  if (clustering.grid_n < 1) throw ParameterError("grid-n must be a positive integer");
  if (!(clustering.theta_band >= 0.0) || !std::isfinite(clustering.theta_band))
    throw ParameterError("theta must be a finite value >= 0");
  if (clustering.gamma && !(*clustering.gamma >= 0.0 && *clustering.gamma <= 1.0))
    throw ParameterError("gamma must lie in [0, 1]");
  if (!(clustering.theta_fraction >= 0.0) || !std::isfinite(clustering.theta_fraction))
    throw ParameterError("theta-fraction must be a finite value >= 0");
}

std::optional<double> parse_gamma(const std::string& text) {
  if (text == "auto") return std::nullopt;
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ParameterError("gamma must be `auto` or a number in [0, 1], got `" + text + "`");
  }
  if (!(value >= 0.0 && value <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
  return value;
}

namespace {

std::string fixed(double v, int digits = 6) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

Rgb hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = v - c;
  auto q = [m](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
  return {q(r), q(g), q(b)};
}

std::string cluster_report(const ClusterOutcome& outcome, const RunConfig& config) {
  const ClusterMap& map = outcome.map;
  std::ostringstream out;
  out << "image " << map.width << "x" << map.height << "\n";
  out << "grid_n " << config.clustering.grid_n << "\n";
  out << "theta " << fixed(config.clustering.theta_band) << "\n";
  out << "gamma " << (config.clustering.gamma ? fixed(*config.clustering.gamma) : std::string("auto")) << "\n";
  out << "theta_fraction " << fixed(config.clustering.theta_fraction) << "\n";
  out << "merge_similar_seeds " << (config.clustering.merge_similar_seeds ? "on" : "off") << "\n";
  out << "refine " << (config.refine ? "on" : "off") << "\n";
  out << "passes " << map.pass_log.size() << "\n";
  out << "clusters " << map.clusters.size() << "\n";
  for (const ClusterInfo& c : map.clusters) {
    out << "cluster " << c.id << " pixels=" << c.member_pixel_count << " cells=" << c.member_cells.size()
        << " seed_pixel=" << c.seed_pixel_index << " seed_hue=" << fixed(c.seed_pixel.h, 4)
        << " seed_saturation=" << fixed(c.seed_pixel.s, 4) << " seed_intensity=" << fixed(c.seed_pixel.i, 4)
        << " seed_cell=" << c.seed_cell.row << "," << c.seed_cell.col << "\n";
  }
  for (const PassRecord& p : map.pass_log) {
    out << "pass " << p.pass << " cluster=" << p.cluster << " seed_pixel=" << p.seed_pixel_index << " seed_hue=" << fixed(p.seed_pixel.h, 4)
        << " threshold=" << fixed(p.threshold) << " cells_claimed=" << p.claimed.size() << "\n";
  }
  if (outcome.refine) {
    const RefineStats& r = *outcome.refine;
    out << "refine border_cells=" << r.border_cells << " border_pixels=" << r.border_pixels
        << " reassigned=" << r.reassigned << " shortcut=" << r.shortcut_decisions << " beta=" << r.beta_decisions
        << " single_candidate=" << r.single_candidate << "\n";
    for (ClusterId id : r.dropped_clusters) out << "dropped_pass_cluster " << id << "\n";
  }
  return out.str();
}

std::string perf_report(const PerfStats& stats) {
  std::ostringstream out;
  out << "n_cells " << stats.n_cells << "\n";
  out << "k_seeds " << stats.k_seeds << "\n";
  out << "q_border_cells " << stats.q_border_cells << "\n";
  out << "r_border_pixels " << stats.r_border_pixels << "\n";
  return out.str();
}

}  // namespace

Palette cluster_palette(std::size_t cluster_count) {
  Palette palette;
  std::set<Rgb> taken{Rgb{0, 0, 0}};
  for (std::size_t k = 0; k < cluster_count; ++k) {
    const double hue = std::fmod(static_cast<double>(k) * 137.50776405, 360.0);
    const double sat = (k / 7) % 2 == 0 ? 0.85 : 0.55;
    const double val = 1.0 - 0.2 * static_cast<double>((k / 14) % 3);
    Rgb color = hsv_to_rgb(hue, sat, val);
    while (taken.contains(color)) {
      color.r = static_cast<std::uint8_t>(color.r + 1);
      if (color.r == 0) color.g = static_cast<std::uint8_t>(color.g + 1);
    }
    taken.insert(color);
    palette.emplace(static_cast<LabelId>(k), PaletteEntry{"cluster_" + std::to_string(k), color});
  }
  return palette;
}

ClusterOutcome cluster_image(const ImageRaster& image, const RunConfig& config) {
  config.clustering.validate(image.width(), image.height());
  RoughResult rough = rough_cluster(image, config.clustering);
  ClusterOutcome outcome{std::move(rough.map), std::move(rough.grid), rough.stats, std::nullopt};

  const auto start = std::chrono::steady_clock::now();
  const BorderSet border = find_border_cells(outcome.map, outcome.grid);
  outcome.stats.q_border_cells = border.border_cells.size();
  outcome.stats.r_border_pixels = border.border_pixels.size();
  outcome.stats.border_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (config.refine) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<HsiPixel> hsi = to_hsi(image);
    RefineResult refined = refine_boundaries(hsi, outcome.map, outcome.grid);
    outcome.map = std::move(refined.map);
    outcome.grid = std::move(refined.grid);
    outcome.refine = std::move(refined.stats);
    outcome.stats.refine_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  outcome.map.recount();
  return outcome;
}

ClusterOutcome cmd_cluster(const RunConfig& config, std::ostream& log) {
  config.validate();
  const ImageRaster image = load_ppm(config.input);
  ClusterOutcome outcome = cluster_image(image, config);
  if (outcome.map.clusters.size() >= kUnclassified) throw DataError("too many clusters for a label map");

  ensure_out_dir(config.out_dir);
  LabelRaster labels{image.width(), image.height(), {}, cluster_palette(outcome.map.clusters.size())};
  labels.labels.reserve(image.size());
  for (ClusterId id : outcome.map.assignment) labels.labels.push_back(static_cast<LabelId>(id));
  save_label_map(labels, config.out_dir / files::kClusterMap);
  save_palette(labels.palette, config.out_dir / files::kClusterPalette);
  write_file(config.out_dir / files::kClusterReport, cluster_report(outcome, config));
  write_file(config.out_dir / files::kPerfStats, perf_report(outcome.stats));

  log << "clusters: " << outcome.map.clusters.size() << " (passes " << outcome.map.pass_log.size() << ")\n";
  log << "timing: hsi " << fixed(outcome.stats.hsi_seconds, 4) << "s, rough " << fixed(outcome.stats.rough_seconds, 4)
      << "s, border " << fixed(outcome.stats.border_seconds, 4) << "s, refine "
      << fixed(outcome.stats.refine_seconds, 4) << "s\n";
  return outcome;
}

ClusterMap load_cluster_map(const fs::path& out_dir) {
  const fs::path map_path = out_dir / files::kClusterMap;
  const fs::path pal_path = out_dir / files::kClusterPalette;
  if (!fs::exists(map_path) || !fs::exists(pal_path))
    throw IoError("cluster output missing in " + out_dir.string() + "; run `cluster` first");
  const Palette palette = load_palette(pal_path);
  const LabelRaster labels = decode_label_map(load_ppm(map_path), palette);
  ClusterMap map;
  map.width = labels.width;
  map.height = labels.height;
  std::size_t k = 0;
  for (const auto& [id, entry] : palette) {
    if (id != k++) throw DataError("cluster palette ids are not dense");
  }
  map.clusters.resize(palette.size());
  for (std::size_t c = 0; c < map.clusters.size(); ++c) map.clusters[c].id = static_cast<ClusterId>(c);
  map.assignment.reserve(labels.labels.size());
  for (LabelId id : labels.labels) {
    if (id == kUnclassified) throw DataError("cluster map contains unassigned pixels");
    map.assignment.push_back(id);
  }
  map.recount();
  return map;
}

InduceOutcome cmd_induce(const RunConfig& config, const fs::path& labels_path, std::ostream& log) {
  config.validate();
  const ImageRaster image = load_ppm(config.input);
  const ClusterMap map = load_cluster_map(config.out_dir);
  if (map.width != image.width() || map.height != image.height())
    throw DataError("cluster map dimensions do not match " + config.input.string());
  const LabelsFile labels = load_labels_file(labels_path);
  const std::vector<HsiPixel> hsi = to_hsi(image);
  const TrainingTable training = build_decision_table(hsi, map, labels, config.disc);

  InduceOutcome outcome;
  outcome.rows = training.table.row_count();
  outcome.consistent = is_consistent(training.table);
  outcome.rules = induce_rules(training.table);

  const auto certain = std::count_if(outcome.rules.begin(), outcome.rules.end(),
                                     [](const Rule& r) { return r.certainty == Certainty::certain; });
  const auto possible = static_cast<std::ptrdiff_t>(outcome.rules.size()) - certain;

  ensure_out_dir(config.out_dir);
  write_file(config.out_dir / files::kRulesText, encode_rules_text(outcome.rules));
  write_file(config.out_dir / files::kRulesRecords, encode_rules_records(outcome.rules, config.disc));

  std::ostringstream report;
  report << "rows " << outcome.rows << "\n";
  report << "classes " << training.table.decision_count() << "\n";
  report << "bins " << config.disc.bins << "\n";
  report << "consistency " << (outcome.consistent ? "consistent" : "inconsistent") << "\n";
  report << "certain_rules " << certain << "\n";
  report << "possible_rules " << possible << "\n";
  for (ClusterId id : training.unlabeled_clusters) report << "unlabeled_cluster " << id << "\n";
  write_file(config.out_dir / files::kInduceReport, report.str());

  for (ClusterId id : training.unlabeled_clusters) log << "cluster " << id << " is unlabeled; excluded from training\n";
  log << "table: " << outcome.rows << " rows, " << (outcome.consistent ? "consistent" : "inconsistent") << "\n";
  log << "rules: " << certain << " certain, " << possible << " possible\n";
  return outcome;
}

ClassifyOutcome cmd_classify(const RunConfig& config, const fs::path& rules_path,
                             const std::optional<fs::path>& truth, std::ostream& log) {
  config.validate();
  const RuleBase base = parse_rules_records(read_file(rules_path));
  if (base.rules.empty()) throw DataError("rules file " + rules_path.string() + " contains no rules");
  const ImageRaster image = load_ppm(config.input);

  ClassifyOutcome outcome;
  outcome.labels = classify_image(image, base.rules, base.disc);
  outcome.unclassified = unclassified_fraction(outcome.labels);

  std::optional<LabelRaster> truth_labels;
  if (truth) {
    truth_labels = decode_label_map(load_ppm(*truth), load_palette(palette_path_for(*truth)));
    if (truth_labels->width != image.width() || truth_labels->height != image.height())
      throw DataError("truth raster dimensions do not match " + config.input.string());
    outcome.accuracy = accuracy(outcome.labels, *truth_labels);
    std::vector<bool> labeled(truth_labels->labels.size());
    for (std::size_t p = 0; p < labeled.size(); ++p) labeled[p] = truth_labels->labels[p] != kUnclassified;
    outcome.labeled_accuracy = accuracy(outcome.labels, *truth_labels, labeled);
  }

  ensure_out_dir(config.out_dir);
  save_label_map(outcome.labels, config.out_dir / files::kClassified);
  save_palette(outcome.labels.palette, config.out_dir / files::kClassifiedPalette);

  std::ostringstream coverage;
  coverage << "pixels " << outcome.labels.labels.size() << "\n";
  coverage << "unclassified_fraction " << fixed(outcome.unclassified) << "\n";
  std::vector<std::size_t> per_class(outcome.labels.palette.size(), 0);
  for (LabelId id : outcome.labels.labels) {
    if (id != kUnclassified) ++per_class[id];
  }
  for (const auto& [id, entry] : outcome.labels.palette) coverage << "class " << entry.name << " " << per_class[id] << "\n";
  if (outcome.accuracy) {
    coverage << "accuracy " << fixed(*outcome.accuracy) << "\n";
    coverage << "labeled_accuracy " << fixed(*outcome.labeled_accuracy) << "\n";
  }
  write_file(config.out_dir / files::kCoverage, coverage.str());

  // Object labels need the clustering of this same image.
  const fs::path objects_path = config.out_dir / files::kObjects;
  std::error_code ec;
  fs::remove(objects_path, ec);
  if (fs::exists(config.out_dir / files::kClusterMap) && fs::exists(config.out_dir / files::kClusterPalette)) {
    const ClusterMap map = load_cluster_map(config.out_dir);
    if (map.width == image.width() && map.height == image.height()) {
      std::ostringstream objects;
      for (const ObjectLabel& obj : object_labels(map, outcome.labels)) {
        objects << "cluster " << obj.cluster << " pixels=" << obj.pixels
                << " class=" << (obj.majority ? *obj.majority : std::string("unclassified"))
                << " agreeing=" << obj.majority_pixels << "\n";
      }
      write_file(objects_path, objects.str());
    }
  }

  log << "unclassified fraction: " << fixed(outcome.unclassified) << "\n";
  if (outcome.accuracy) {
    log << "accuracy: " << fixed(*outcome.accuracy) << " (labeled pixels: " << fixed(*outcome.labeled_accuracy)
        << ")\n";
  }
  return outcome;
}

bool cmd_pipeline(const RunConfig& config, const std::optional<fs::path>& labels_path,
                  const std::optional<fs::path>& truth, std::ostream& log) {
  cmd_cluster(config, log);
  if (!labels_path) {
    log << "no labels file given: clustering written to " << config.out_dir.string() << ".\n"
        << "Inspect " << files::kClusterReport << " and " << files::kClusterMap
        << ", write one `<cluster_id> <class_name>` line per cluster, then rerun with --labels <file>.\n";
    return false;
  }
  if (!fs::exists(*labels_path)) {
    throw IoError("labels file " + labels_path->string() + " does not exist; clustering was written to " +
                  config.out_dir.string() + ", label its clusters in that file and rerun");
  }
  cmd_induce(config, *labels_path, log);
  cmd_classify(config, config.out_dir / files::kRulesRecords, truth, log);
  return true;
}

}  // namespace roughclus
