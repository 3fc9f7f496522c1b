// roughclus: grid-density rough clustering, rough-set rule induction and
// rule-based pixel classification of RGB rasters.
//
// Exit status: 0 success, 2 parameter error, 3 I/O error, 4 data error.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "roughclus/errors.hpp"
#include "roughclus/pipeline.hpp"

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

struct Options {
  std::string image;
  std::string out = "out";
  double theta = 0.1;
  std::string gamma = "auto";
  double theta_fraction = 0.9;
  std::size_t grid_n = 32;
  int bins = 8;
  bool no_refine = false;
  bool no_seed_merge = false;
  std::string labels;
  std::string rules;
  std::string truth;
  std::string table;
};

void add_clustering_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--theta", o.theta, "HSI distance threshold for pixel similarity")->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "cell claiming ratio in [0,1], or `auto`")->capture_default_str();
  cmd->add_option("--theta-fraction", o.theta_fraction, "auto-gamma multiplier of the seed cell ratio")
      ->capture_default_str();
  cmd->add_option("--grid-n", o.grid_n, "cells per image side")->capture_default_str();
  cmd->add_flag("--no-refine", o.no_refine, "skip boundary refinement");
  cmd->add_flag("--no-seed-merge", o.no_seed_merge, "open a new cluster on every pass, even for similar seeds");
}

roughclus::RunConfig make_config(const Options& o) {
  roughclus::RunConfig config;
  config.input = o.image;
  config.out_dir = o.out;
  config.clustering.theta_band = o.theta;
  config.clustering.gamma = roughclus::parse_gamma(o.gamma);
  config.clustering.theta_fraction = o.theta_fraction;
  config.clustering.grid_n = o.grid_n;
  config.disc.bins = o.bins;
  config.refine = !o.no_refine;
  config.clustering.merge_similar_seeds = !o.no_seed_merge;
  config.validate();
  return config;
}

std::optional<std::filesystem::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-density rough clustering and rough-set rule classification of RGB rasters"};
  app.require_subcommand(1);
  Options o;

  auto* cluster = app.add_subcommand("cluster", "cluster an image into objects");
  cluster->add_option("image", o.image, "input PPM")->required();
  cluster->add_option("--out", o.out, "output directory")->capture_default_str();
  add_clustering_flags(cluster, o);

  auto* induce = app.add_subcommand("induce", "induce rules from labeled clusters");
  induce->add_option("image", o.image, "the clustered PPM")->required();
  induce->add_option("--labels", o.labels, "`<cluster_id> <class_name>` per line")->required();
  induce->add_option("--out", o.out, "directory holding the cluster outputs")->capture_default_str();
  induce->add_option("--bins", o.bins, "bins per HSI channel")->capture_default_str();

  auto* classify = app.add_subcommand("classify", "classify an image pixel-wise against a rule base");
  classify->add_option("image", o.image, "PPM to classify")->required();
  classify->add_option("--rules", o.rules, "rule records file (rules.kv)")->required();
  classify->add_option("--out", o.out, "output directory")->capture_default_str();
  classify->add_option("--truth", o.truth, "ground-truth label PPM with a .pal sidecar");

  auto* pipeline = app.add_subcommand("pipeline", "cluster, induce and classify in one run");
  pipeline->add_option("image", o.image, "input PPM")->required();
  pipeline->add_option("--labels", o.labels, "`<cluster_id> <class_name>` per line");
  pipeline->add_option("--out", o.out, "output directory")->capture_default_str();
  pipeline->add_option("--bins", o.bins, "bins per HSI channel")->capture_default_str();
  pipeline->add_option("--truth", o.truth, "ground-truth label PPM with a .pal sidecar");
  add_clustering_flags(pipeline, o);

  auto* lem2 = app.add_subcommand("lem2", "print LEM2 rules for a delimited decision table");
  lem2->add_option("table", o.table, "header of attribute names ending in `class`, one example per line")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParameter;
  }

  try {
    if (*lem2) {
      const auto table = roughclus::parse_decision_table(roughclus::read_file(o.table));
      std::cout << "consistency " << (roughclus::is_consistent(table) ? "consistent" : "inconsistent") << "\n";
      std::cout << roughclus::encode_rules_text(roughclus::induce_rules(table));
      return 0;
    }
    const roughclus::RunConfig config = make_config(o);
    if (*cluster) {
      roughclus::cmd_cluster(config, std::cout);
    } else if (*induce) {
      roughclus::cmd_induce(config, o.labels, std::cout);
    } else if (*classify) {
      roughclus::cmd_classify(config, o.rules, optional_path(o.truth), std::cout);
    } else if (*pipeline) {
      roughclus::cmd_pipeline(config, optional_path(o.labels), optional_path(o.truth), std::cout);
    }
  } catch (const roughclus::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const roughclus::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const roughclus::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
