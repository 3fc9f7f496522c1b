#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace roughclus {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  auto operator<=>(const Rgb&) const = default;
};

/// Row-major RGB raster, 8 bits per channel.
class ImageRaster {
 public:
  ImageRaster() = default;
  ImageRaster(std::size_t width, std::size_t height, Rgb fill = {});
  ImageRaster(std::size_t width, std::size_t height, std::vector<Rgb> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  const Rgb& operator[](std::size_t index) const { return pixels_[index]; }
  Rgb& operator[](std::size_t index) { return pixels_[index]; }
  const Rgb& at(std::size_t x, std::size_t y) const { return pixels_.at(y * width_ + x); }
  Rgb& at(std::size_t x, std::size_t y) { return pixels_.at(y * width_ + x); }

  const std::vector<Rgb>& pixels() const noexcept { return pixels_; }

  bool operator==(const ImageRaster&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Rgb> pixels_;
};

using LabelId = std::uint16_t;
inline constexpr LabelId kUnclassified = 0xFFFF;

struct PaletteEntry {
  std::string name;
  Rgb color;

  bool operator==(const PaletteEntry&) const = default;
};

using Palette = std::map<LabelId, PaletteEntry>;

/// Per-pixel class labels plus the palette that names and colors them.
/// kUnclassified is reserved and never appears in the palette; it renders black.
struct LabelRaster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<LabelId> labels;
  Palette palette;

  /// Throws DataError when the dimensions or label ids are inconsistent.
  void validate() const;

  bool operator==(const LabelRaster&) const = default;
};

// PPM (P3 / P6, maxval 255). Comments are allowed anywhere in the header.
ImageRaster parse_ppm(std::string_view bytes);
ImageRaster load_ppm(const std::filesystem::path& path);

std::string encode_ppm(const ImageRaster& image, bool binary = true);
void save_ppm(const ImageRaster& image, const std::filesystem::path& path, bool binary = true);

/// Renders a label map to an RGB raster using its palette colors.
ImageRaster render_label_map(const LabelRaster& labels);
void save_label_map(const LabelRaster& labels, const std::filesystem::path& path);

// Palette sidecar: one `<id> <name> <r> <g> <b>` line per label.
Palette parse_palette(std::string_view text);
std::string encode_palette(const Palette& palette);
Palette load_palette(const std::filesystem::path& path);
void save_palette(const Palette& palette, const std::filesystem::path& path);

/// Recovers label ids from a palette-colored raster. Black pixels map to
/// kUnclassified unless the palette assigns black to a label.
LabelRaster decode_label_map(const ImageRaster& image, const Palette& palette);

/// Sidecar path convention: `map.ppm` -> `map.pal`.
std::filesystem::path palette_path_for(const std::filesystem::path& ppm_path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace roughclus
