#include "roughclus/boundary_refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "roughclus/errors.hpp"

namespace roughclus {

namespace {

using Feature = std::array<double, 4>;

double squared_distance(const Feature& a, const Feature& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return sum;
}

// Below this, a within-cluster sum of squares is rounding noise on identical
// feature vectors.
constexpr double kZeroSsPerPixel = 1e-24;

struct ClusterMoments {
  std::size_t n = 0;
  Feature sum{};

  Feature mean() const {
    Feature m{};
    if (n == 0) return m;
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = sum[k] / static_cast<double>(n);
    return m;
  }
  void add(const Feature& x) {
    ++n;
    for (std::size_t k = 0; k < x.size(); ++k) sum[k] += x[k];
  }
  void remove(const Feature& x) {
    --n;
    for (std::size_t k = 0; k < x.size(); ++k) sum[k] -= x[k];
  }
};

}  // namespace

std::array<double, 4> beta_features(const HsiPixel& p) {
  constexpr double radius = 1.0 / (2.0 * std::numbers::pi);
  const double angle = p.h * std::numbers::pi / 180.0;
  return {radius * std::cos(angle), radius * std::sin(angle), p.s, p.i};
}

BorderSet find_border_cells(const ClusterMap& map, const Grid& grid) {
  if (map.width != grid.image_width() || map.height != grid.image_height())
    throw DataError("cluster map and grid dimensions differ");
  BorderSet out;
  for (const GridCell& cell : grid.cells()) {
    if (!cell.cluster_id) throw DataError("grid contains unclustered cells");
    bool border = false;
    for (CellIndex nb : grid.neighbours(cell.index)) {
      if (grid.cell(nb).cluster_id != cell.cluster_id) {
        border = true;
        break;
      }
    }
    if (!border) continue;
    out.border_cells.push_back(cell.index);
    out.border_pixels.insert(out.border_pixels.end(), cell.pixel_indices.begin(), cell.pixel_indices.end());
  }
  std::sort(out.border_pixels.begin(), out.border_pixels.end());
  return out;
}

BetaScore beta_measure(std::span<const HsiPixel> hsi, std::span<const ClusterId> assignment) {
  if (hsi.size() != assignment.size()) throw DataError("assignment size does not match image");
  if (hsi.empty()) throw DataError("beta measure of an empty image");

  std::vector<Feature> features(hsi.size());
  std::map<ClusterId, ClusterMoments> clusters;
  ClusterMoments global;
  for (std::size_t p = 0; p < hsi.size(); ++p) {
    if (assignment[p] == kNoCluster) throw DataError("beta measure requires a total assignment");
    features[p] = beta_features(hsi[p]);
    clusters[assignment[p]].add(features[p]);
    global.add(features[p]);
  }
  std::map<ClusterId, Feature> means;
  for (const auto& [id, m] : clusters) means.emplace(id, m.mean());
  const Feature global_mean = global.mean();

  BetaScore score;
  for (std::size_t p = 0; p < hsi.size(); ++p) {
    score.total_ss += squared_distance(features[p], global_mean);
    score.within_ss += squared_distance(features[p], means.at(assignment[p]));
  }
  if (score.within_ss <= kZeroSsPerPixel * static_cast<double>(hsi.size())) {
    score.infinite = true;
    score.value = std::numeric_limits<double>::infinity();
  } else {
    score.value = score.total_ss / score.within_ss;
  }
  return score;
}

RefineResult refine_boundaries(std::span<const HsiPixel> hsi, const ClusterMap& map, const Grid& grid) {
  if (hsi.size() != map.assignment.size()) throw DataError("cluster map size does not match image");
  RefineResult result{map, grid, {}};
  ClusterMap& out = result.map;
  RefineStats& stats = result.stats;

  const BorderSet border = find_border_cells(map, grid);
  stats.border_cells = border.border_cells.size();
  stats.border_pixels = border.border_pixels.size();
  if (border.border_pixels.empty()) return result;

  const std::size_t k = map.clusters.size();
  std::vector<Feature> features(hsi.size());
  std::vector<ClusterMoments> moments(k);
  ClusterMoments global;
  for (std::size_t p = 0; p < hsi.size(); ++p) {
    features[p] = beta_features(hsi[p]);
    moments.at(map.assignment[p]).add(features[p]);
    global.add(features[p]);
  }
  double total_ss = 0.0;
  const Feature global_mean = global.mean();
  for (const Feature& f : features) total_ss += squared_distance(f, global_mean);
  const double tie_tolerance = 1e-12 * total_ss;

  // Visit order: clusters by id, pixels by ascending raster index.
  std::vector<std::vector<std::size_t>> visit(k);
  for (std::size_t p : border.border_pixels) visit[map.assignment[p]].push_back(p);

  std::vector<bool> visited(hsi.size(), false);
  const std::size_t width = map.width;
  const std::size_t height = map.height;

  // Change in pooled within-cluster SS when x leaves `from` and joins `to`.
  auto delta_within = [&](const Feature& x, ClusterId from, ClusterId to) {
    if (from == to) return 0.0;
    const ClusterMoments& a = moments[from];
    const ClusterMoments& b = moments[to];
    double leave = 0.0;
    if (a.n > 1) {
      const double na = static_cast<double>(a.n);
      leave = na / (na - 1.0) * squared_distance(x, a.mean());
    }
    double join = 0.0;
    if (b.n > 0) {
      const double nb = static_cast<double>(b.n);
      join = nb / (nb + 1.0) * squared_distance(x, b.mean());
    }
    return join - leave;
  };

  for (std::size_t cluster = 0; cluster < k; ++cluster) {
    for (std::size_t p : visit[cluster]) {
      const ClusterId current = out.assignment[p];
      const CellIndex cell = grid.unflat(grid.cell_of_pixel(p));

      std::vector<ClusterId> candidates{current, *grid.cell(cell).cluster_id};
      for (CellIndex nb : grid.neighbours(cell)) candidates.push_back(*grid.cell(nb).cluster_id);
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

      visited[p] = true;
      if (candidates.size() == 1) {
        ++stats.single_candidate;
        continue;
      }

      std::vector<double> seed_distance(candidates.size());
      for (std::size_t c = 0; c < candidates.size(); ++c)
        seed_distance[c] = hsi_manhattan(hsi[p], out.clusters[candidates[c]].seed_pixel);

      // Strictly nearest seed among the candidates, if unique.
      std::size_t nearest = 0;
      bool unique_nearest = true;
      for (std::size_t c = 1; c < candidates.size(); ++c) {
        if (seed_distance[c] < seed_distance[nearest]) {
          nearest = c;
          unique_nearest = true;
        } else if (seed_distance[c] == seed_distance[nearest]) {
          unique_nearest = false;
        }
      }

      // Shortcut: adopt the cluster of an already classified neighbour pixel
      // when its seed is strictly nearer than every other candidate's.
      bool settled = false;
      ClusterId chosen = current;
      if (unique_nearest) {
        const std::size_t x = p % width;
        const std::size_t y = p / width;
        const std::size_t neighbour_pixels[4] = {
            y > 0 ? p - width : p, x > 0 ? p - 1 : p, x + 1 < width ? p + 1 : p, y + 1 < height ? p + width : p};
        for (std::size_t q : neighbour_pixels) {
          if (q != p && visited[q] && out.assignment[q] == candidates[nearest]) {
            chosen = candidates[nearest];
            settled = true;
            break;
          }
        }
      }

      if (settled) {
        ++stats.shortcut_decisions;
      } else {
        ++stats.beta_decisions;
        // Highest beta is the lowest resulting within-cluster SS; moves that
        // would lower beta are never taken.
        std::vector<double> delta(candidates.size());
        double best = 0.0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          delta[c] = delta_within(features[p], current, candidates[c]);
          best = std::min(best, delta[c]);
        }
        std::size_t pick = candidates.size();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          if (delta[c] > best + tie_tolerance) continue;
          if (candidates[c] != current && delta[c] > 0.0) continue;
          if (pick == candidates.size() || seed_distance[c] < seed_distance[pick] ||
              (seed_distance[c] == seed_distance[pick] && candidates[c] == current)) {
            pick = c;
          }
        }
        chosen = candidates[pick];
      }

      if (chosen != current) {
        moments[current].remove(features[p]);
        moments[chosen].add(features[p]);
        out.assignment[p] = chosen;
        ++stats.reassigned;
      }
    }
  }

  // Drop emptied clusters; their cells go to the cluster holding most of their pixels.
  out.recount();
  std::vector<ClusterId> remap(k, kNoCluster);
  ClusterId next = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (out.clusters[c].member_pixel_count > 0) {
      remap[c] = next++;
    } else {
      stats.dropped_clusters.push_back(static_cast<ClusterId>(c));
    }
  }
  if (stats.dropped_clusters.empty()) return result;

  for (GridCell& cell : result.grid.cells()) {
    if (remap[*cell.cluster_id] != kNoCluster) continue;
    std::vector<std::size_t> votes(k, 0);
    for (std::size_t p : cell.pixel_indices) ++votes[out.assignment[p]];
    cell.cluster_id = static_cast<ClusterId>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  for (GridCell& cell : result.grid.cells()) cell.cluster_id = remap[*cell.cluster_id];
  for (ClusterId& id : out.assignment) id = remap[id];

  std::vector<ClusterInfo> kept;
  for (std::size_t c = 0; c < k; ++c) {
    if (remap[c] == kNoCluster) continue;
    ClusterInfo info = std::move(out.clusters[c]);
    info.id = remap[c];
    info.member_cells.clear();
    kept.push_back(std::move(info));
  }
  for (const GridCell& cell : result.grid.cells()) kept[*cell.cluster_id].member_cells.push_back(cell.index);
  out.clusters = std::move(kept);
  return result;
}

}  // namespace roughclus
