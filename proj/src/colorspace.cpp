#include "roughclus/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "roughclus/errors.hpp"

namespace roughclus {

HsiPixel rgb_to_hsi(Rgb rgb) {
  const double r = rgb.r / 255.0;
  const double g = rgb.g / 255.0;
  const double b = rgb.b / 255.0;
  const double sum = r + g + b;

  HsiPixel out;
  out.i = sum / 3.0;
  if (rgb.r == rgb.g && rgb.g == rgb.b) return out;  // achromatic, includes black

  out.s = 1.0 - 3.0 * std::min({r, g, b}) / sum;
  const double num = 0.5 * ((r - g) + (r - b));
  const double den = std::sqrt((r - g) * (r - g) + (r - b) * (g - b));
  const double theta = std::acos(std::clamp(num / den, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  out.h = b <= g ? theta : 360.0 - theta;
  if (out.h >= 360.0) out.h = 0.0;
  return out;
}

std::vector<HsiPixel> to_hsi(const ImageRaster& image) {
  std::vector<HsiPixel> out;
  out.reserve(image.size());
  for (const Rgb& p : image.pixels()) out.push_back(rgb_to_hsi(p));
  return out;
}

double hue_difference(double h1, double h2) {
  const double d = std::abs(h1 - h2);
  return std::min(d, 360.0 - d);
}

double hsi_manhattan(const HsiPixel& a, const HsiPixel& b) {
  return hue_difference(a.h, b.h) / 360.0 + std::abs(a.s - b.s) + std::abs(a.i - b.i);
}

void ClusteringParams::validate(std::size_t width, std::size_t height) const {
  if (!(theta_band >= 0.0) || !std::isfinite(theta_band)) throw ParameterError("theta must be a finite value >= 0");
  if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
  if (!(theta_fraction >= 0.0) || !std::isfinite(theta_fraction))
    throw ParameterError("theta-fraction must be a finite value >= 0");
  if (grid_n < 1 || grid_n > std::min(width, height))
    throw ParameterError("grid-n must lie in [1, " + std::to_string(std::min(width, height)) + "], got " +
                         std::to_string(grid_n));
}

}  // namespace roughclus
