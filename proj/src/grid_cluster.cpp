#include "roughclus/grid_cluster.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "roughclus/errors.hpp"

namespace roughclus {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Grid::Grid(std::size_t image_width, std::size_t image_height, std::size_t n)
    : n_(n), width_(image_width), height_(image_height) {
  if (n < 1 || n > std::min(image_width, image_height))
    throw ParameterError("grid-n must lie in [1, " + std::to_string(std::min(image_width, image_height)) +
                         "], got " + std::to_string(n));
  cells_.resize(n * n);
  pixel_cell_.resize(image_width * image_height);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t y0 = r * image_height / n;
    const std::size_t y1 = (r + 1) * image_height / n;
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t x0 = c * image_width / n;
      const std::size_t x1 = (c + 1) * image_width / n;
      GridCell& cell = cells_[r * n + c];
      cell.index = {r, c};
      cell.pixel_indices.reserve((y1 - y0) * (x1 - x0));
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) {
          const std::size_t p = y * image_width + x;
          cell.pixel_indices.push_back(p);
          pixel_cell_[p] = r * n + c;
        }
      }
      cell.density = cell.pixel_indices.size();
    }
  }
}

std::vector<CellIndex> Grid::neighbours(CellIndex idx) const {
  std::vector<CellIndex> out;
  out.reserve(4);
  if (idx.row > 0) out.push_back({idx.row - 1, idx.col});
  if (idx.col > 0) out.push_back({idx.row, idx.col - 1});
  if (idx.col + 1 < n_) out.push_back({idx.row, idx.col + 1});
  if (idx.row + 1 < n_) out.push_back({idx.row + 1, idx.col});
  return out;
}

void ClusterMap::recount() {
  for (auto& c : clusters) c.member_pixel_count = 0;
  for (ClusterId id : assignment) {
    if (id != kNoCluster) ++clusters.at(id).member_pixel_count;
  }
}

Grid build_grid(std::size_t width, std::size_t height, std::size_t grid_n) { return Grid(width, height, grid_n); }

Grid build_grid(const ImageRaster& image, std::size_t grid_n) {
  return build_grid(image.width(), image.height(), grid_n);
}

std::size_t select_seed_pixel(std::span<const HsiPixel> hsi, std::span<const ClusterId> assignment) {
  std::size_t best = hsi.size();
  for (std::size_t p = 0; p < hsi.size(); ++p) {
    if (assignment[p] != kNoCluster) continue;
    if (best == hsi.size() || hsi[p].h > hsi[best].h) best = p;
  }
  if (best == hsi.size()) throw DataError("all pixels are already clustered");
  return best;
}

void score_cells(Grid& grid, std::span<const HsiPixel> hsi, const HsiPixel& seed, double theta_band) {
  for (GridCell& cell : grid.cells()) {
    if (cell.cluster_id) continue;
    std::size_t count = 0;
    for (std::size_t p : cell.pixel_indices) count += similarity_flag(hsi[p], seed, theta_band) ? 1 : 0;
    cell.population_count = count;
    cell.population_object_ratio =
        cell.density == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(cell.density);
  }
}

CellIndex select_seed_cell(const Grid& grid) {
  const GridCell* best = nullptr;
  for (const GridCell& cell : grid.cells()) {
    if (cell.cluster_id) continue;
    if (!best || cell.population_object_ratio > best->population_object_ratio) best = &cell;
  }
  if (!best) throw DataError("no unclustered cells remain");
  return best->index;
}

double effective_gamma(const ClusteringParams& params, double seed_ratio) {
  if (params.gamma) return *params.gamma;
  return std::clamp(params.theta_fraction * seed_ratio, 0.0, 1.0);
}

RoughResult rough_cluster(const ImageRaster& image, const ClusteringParams& params) {
  params.validate(image.width(), image.height());
  RoughResult result;
  PerfStats& stats = result.stats;

  auto t0 = Clock::now();
  result.grid = build_grid(image, params.grid_n);
  stats.grid_seconds = seconds_since(t0);

  t0 = Clock::now();
  const std::vector<HsiPixel> hsi = to_hsi(image);
  stats.hsi_seconds = seconds_since(t0);

  t0 = Clock::now();
  Grid& grid = result.grid;
  ClusterMap& map = result.map;
  map.width = image.width();
  map.height = image.height();
  map.assignment.assign(image.size(), kNoCluster);

  std::size_t unclustered_cells = grid.cell_count();
  while (unclustered_cells > 0) {
    const std::size_t seed_index = select_seed_pixel(hsi, map.assignment);
    const HsiPixel seed = hsi[seed_index];
    score_cells(grid, hsi, seed, params.theta_band);
    const CellIndex seed_cell = select_seed_cell(grid);
    const double threshold = effective_gamma(params, grid.cell(seed_cell).population_object_ratio);

    auto id = static_cast<ClusterId>(map.clusters.size());
    if (params.merge_similar_seeds) {
      double nearest = 0.0;
      for (const ClusterInfo& c : map.clusters) {
        const double d = hsi_manhattan(seed, c.seed_pixel);
        if (d <= params.theta_band && (id == map.clusters.size() || d < nearest)) {
          id = c.id;
          nearest = d;
        }
      }
    }
    if (id == map.clusters.size()) map.clusters.push_back({id, seed_index, seed, seed_cell, {}, 0});
    ClusterInfo& info = map.clusters[id];
    PassRecord pass{map.pass_log.size(), id, seed_index, seed, threshold, {}};

    auto claim = [&](GridCell& cell) {
      cell.cluster_id = id;
      for (std::size_t p : cell.pixel_indices) map.assignment[p] = id;
      info.member_cells.push_back(cell.index);
      info.member_pixel_count += cell.density;
      pass.claimed.push_back({cell.index, cell.population_object_ratio});
      --unclustered_cells;
    };

    claim(grid.cell(seed_cell));
    for (GridCell& cell : grid.cells()) {
      if (!cell.cluster_id && cell.population_object_ratio >= threshold) claim(cell);
    }
    map.pass_log.push_back(std::move(pass));
  }
  stats.rough_seconds = seconds_since(t0);
  stats.n_cells = grid.cell_count();
  stats.k_seeds = map.pass_log.size();
  return result;
}

}  // namespace roughclus
