#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "roughclus/raster_io.hpp"

namespace roughclus {

/// Hue in degrees [0, 360), saturation and intensity in [0, 1].
/// Achromatic pixels (r == g == b, including black) carry h = 0, s = 0.
struct HsiPixel {
  double h = 0.0;
  double s = 0.0;
  double i = 0.0;

  bool operator==(const HsiPixel&) const = default;
};

HsiPixel rgb_to_hsi(Rgb rgb);
std::vector<HsiPixel> to_hsi(const ImageRaster& image);

/// Circular hue difference in degrees, in [0, 180].
double hue_difference(double h1, double h2);

/// |dh|/360 + |ds| + |di| with dh taken around the hue circle. Range [0, 2.5].
double hsi_manhattan(const HsiPixel& a, const HsiPixel& b);

inline bool similarity_flag(const HsiPixel& p, const HsiPixel& seed, double theta_band) {
  return hsi_manhattan(p, seed) <= theta_band;
}

/// Parameters of the rough clustering phase.
///
/// theta_band is the per-pixel HSI distance threshold. gamma is the cell
/// claiming threshold on the population-object ratio; when absent it is
/// derived every pass as theta_fraction times the seed cell's ratio.
/// With merge_similar_seeds, a pass whose seed pixel lies within theta_band
/// of an existing cluster's seed grows that cluster instead of opening a new one.
struct ClusteringParams {
  double theta_band = 0.1;
  std::optional<double> gamma;
  double theta_fraction = 0.9;
  std::size_t grid_n = 32;
  bool merge_similar_seeds = true;

  /// Throws ParameterError when a field is out of range for a width x height image.
  void validate(std::size_t width, std::size_t height) const;
};

}  // namespace roughclus
