#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "roughclus/colorspace.hpp"
#include "roughclus/raster_io.hpp"

namespace roughclus {

using ClusterId = std::uint32_t;
inline constexpr ClusterId kNoCluster = std::numeric_limits<ClusterId>::max();

struct CellIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const CellIndex&) const = default;
};

/// One cell of the n x n spatial partition.
struct GridCell {
  CellIndex index;
  std::vector<std::size_t> pixel_indices;
  std::size_t density = 0;
  std::size_t population_count = 0;
  double population_object_ratio = 0.0;
  std::optional<ClusterId> cluster_id;
};

/// n x n partition of an image. Cell (r, c) spans rows
/// [floor(r*H/n), floor((r+1)*H/n)) and the analogous columns.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t image_width, std::size_t image_height, std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t image_width() const noexcept { return width_; }
  std::size_t image_height() const noexcept { return height_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  GridCell& cell(CellIndex idx) { return cells_[flat(idx)]; }
  const GridCell& cell(CellIndex idx) const { return cells_[flat(idx)]; }
  std::size_t flat(CellIndex idx) const noexcept { return idx.row * n_ + idx.col; }
  CellIndex unflat(std::size_t k) const noexcept { return {k / n_, k % n_}; }

  std::vector<GridCell>& cells() noexcept { return cells_; }
  const std::vector<GridCell>& cells() const noexcept { return cells_; }

  /// Flat index of the cell containing a raster pixel.
  std::size_t cell_of_pixel(std::size_t pixel) const { return pixel_cell_[pixel]; }

  /// 4-neighbours of a cell inside the grid, in up, left, right, down order.
  std::vector<CellIndex> neighbours(CellIndex idx) const;

 private:
  std::size_t n_ = 0;
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<GridCell> cells_;
  std::vector<std::size_t> pixel_cell_;
};

struct ClusterInfo {
  ClusterId id = 0;
  std::size_t seed_pixel_index = 0;
  HsiPixel seed_pixel;
  CellIndex seed_cell;
  std::vector<CellIndex> member_cells;
  std::size_t member_pixel_count = 0;
};

struct ClaimedCell {
  CellIndex cell;
  double ratio = 0.0;
};

/// One pass of the rough phase. claimed[0] is always the seed cell, which
/// is taken regardless of threshold; the rest satisfy ratio >= threshold.
struct PassRecord {
  std::size_t pass = 0;
  ClusterId cluster = 0;
  std::size_t seed_pixel_index = 0;
  HsiPixel seed_pixel;
  double threshold = 0.0;
  std::vector<ClaimedCell> claimed;
};

struct ClusterMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<ClusterId> assignment;  // kNoCluster while unassigned
  std::vector<ClusterInfo> clusters;  // clusters[k].id == k
  std::vector<PassRecord> pass_log;

  std::size_t cluster_count() const noexcept { return clusters.size(); }
  /// Recounts member_pixel_count from the assignment.
  void recount();
};

struct PerfStats {
  std::size_t n_cells = 0;
  std::size_t k_seeds = 0;  // passes, one seed pixel each
  std::size_t q_border_cells = 0;
  std::size_t r_border_pixels = 0;
  double hsi_seconds = 0.0;
  double grid_seconds = 0.0;
  double rough_seconds = 0.0;
  double border_seconds = 0.0;
  double refine_seconds = 0.0;
};

/// Builds the grid and computes every cell's density.
Grid build_grid(const ImageRaster& image, std::size_t grid_n);
Grid build_grid(std::size_t width, std::size_t height, std::size_t grid_n);

/// Unclustered pixel of maximum hue, lowest raster index on ties.
std::size_t select_seed_pixel(std::span<const HsiPixel> hsi, std::span<const ClusterId> assignment);

/// Recomputes population count and ratio of every unclustered cell.
void score_cells(Grid& grid, std::span<const HsiPixel> hsi, const HsiPixel& seed, double theta_band);

/// Unclustered cell with the highest ratio, first in row-major order on ties.
CellIndex select_seed_cell(const Grid& grid);

/// Claiming threshold for a pass whose seed cell scored seed_ratio.
double effective_gamma(const ClusteringParams& params, double seed_ratio);

struct RoughResult {
  ClusterMap map;
  Grid grid;
  PerfStats stats;
};

RoughResult rough_cluster(const ImageRaster& image, const ClusteringParams& params);

}  // namespace roughclus
