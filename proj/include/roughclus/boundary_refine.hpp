#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "roughclus/colorspace.hpp"
#include "roughclus/grid_cluster.hpp"

namespace roughclus {

struct BorderSet {
  std::vector<CellIndex> border_cells;     // row-major
  std::vector<std::size_t> border_pixels;  // ascending raster index
};

/// Cells with at least one 4-neighbour cell in a different cluster, plus all
/// of their pixels.
BorderSet find_border_cells(const ClusterMap& map, const Grid& grid);

/// Homogeneity index: total sum of squares over pooled within-cluster sum of
/// squares of the HSI feature vectors. Higher is more homogeneous. A zero
/// within-cluster sum is reported as infinite and ranks above every finite score.
struct BetaScore {
  double value = 1.0;
  double total_ss = 0.0;
  double within_ss = 0.0;
  bool infinite = false;

  bool operator<(const BetaScore& other) const {
    if (infinite || other.infinite) return !infinite && other.infinite;
    return value < other.value;
  }
  bool operator>(const BetaScore& other) const { return other < *this; }
  bool operator<=(const BetaScore& other) const { return !(other < *this); }
  bool operator>=(const BetaScore& other) const { return !(*this < other); }
};

/// Feature embedding used for the sums of squares. Hue is placed on a circle
/// of radius 1/(2*pi) so that small hue differences measure the same as in
/// hsi_manhattan and the vector mean is the circular mean.
std::array<double, 4> beta_features(const HsiPixel& p);

/// Two-pass global computation over the assignment. Pixels with kNoCluster
/// are rejected; ids need not be dense.
BetaScore beta_measure(std::span<const HsiPixel> hsi, std::span<const ClusterId> assignment);

struct RefineStats {
  std::size_t border_cells = 0;
  std::size_t border_pixels = 0;
  std::size_t single_candidate = 0;   // border pixels with no alternative cluster
  std::size_t shortcut_decisions = 0; // settled by the nearest-classified-neighbour rule
  std::size_t beta_decisions = 0;
  std::size_t reassigned = 0;
  std::vector<ClusterId> dropped_clusters;  // ids before recompaction
};

struct RefineResult {
  ClusterMap map;
  Grid grid;  // cell cluster ids remapped after recompaction
  RefineStats stats;
};

/// Pixel-level boundary smoothing of a rough clustering. Only pixels inside
/// border cells may change cluster. Clusters left empty are dropped and the
/// remaining ids recompacted in order.
RefineResult refine_boundaries(std::span<const HsiPixel> hsi, const ClusterMap& map, const Grid& grid);

}  // namespace roughclus
