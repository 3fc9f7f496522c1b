#include "roughclus/raster_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "roughclus/errors.hpp"

namespace roughclus {

ImageRaster::ImageRaster(std::size_t width, std::size_t height, Rgb fill)
    : ImageRaster(width, height, std::vector<Rgb>(width * height, fill)) {}

ImageRaster::ImageRaster(std::size_t width, std::size_t height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width == 0 || height == 0) throw ParameterError("image dimensions must be positive");
  if (pixels_.size() != width * height) throw ParameterError("pixel count does not match width x height");
}

void LabelRaster::validate() const {
  if (width == 0 || height == 0) throw DataError("label map dimensions must be positive");
  if (labels.size() != width * height) throw DataError("label count does not match width x height");
  if (palette.contains(kUnclassified)) throw DataError("palette uses the reserved unclassified id");
  for (LabelId id : labels) {
    if (id != kUnclassified && !palette.contains(id))
      throw DataError("label id " + std::to_string(id) + " missing from palette");
  }
}

namespace {

// Upper bound on decoded pixels; keeps width*height*3 far from overflow.
constexpr std::size_t kMaxPixels = std::size_t{1} << 28;

class PpmReader {
 public:
  explicit PpmReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t token_start() const { return token_start_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::uint64_t read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    token_start_ = start;
    if (pos_ >= bytes_.size()) throw PpmFormatError(std::string("truncated header: missing ") + what, start);
    std::uint64_t value = 0;
    const auto* first = bytes_.data() + pos_;
    const auto* last = bytes_.data() + bytes_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) throw PpmFormatError(std::string(what) + " overflows", start);
    if (ec != std::errc() || ptr == first) throw PpmFormatError(std::string("expected ") + what, start);
    pos_ += static_cast<std::size_t>(ptr - first);
    if (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) && bytes_[pos_] != '#')
      throw PpmFormatError(std::string("malformed ") + what, pos_);
    return value;
  }

  std::string_view rest() const { return bytes_.substr(pos_); }
  void advance(std::size_t n) { pos_ += n; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  char peek() const { return bytes_[pos_]; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::size_t token_start_ = 0;
};

}  // namespace

ImageRaster parse_ppm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '3' && bytes[1] != '6'))
    throw PpmFormatError("malformed magic number (expected P3 or P6)", 0);
  const bool binary = bytes[1] == '6';
  PpmReader in(bytes);
  in.advance(2);
  if (!in.at_end() && !std::isspace(static_cast<unsigned char>(in.peek())) && in.peek() != '#')
    throw PpmFormatError("malformed magic number (expected P3 or P6)", 0);

  const std::uint64_t width = in.read_uint("width");
  const std::size_t width_at = in.token_start();
  const std::uint64_t height = in.read_uint("height");
  if (width == 0 || height == 0) throw PpmFormatError("image dimensions must be positive", width_at);
  if (width > kMaxPixels || height > kMaxPixels || width * height > kMaxPixels)
    throw PpmFormatError("dimension overflow", width_at);
  const std::uint64_t maxval = in.read_uint("maxval");
  const std::size_t maxval_at = in.token_start();
  if (maxval != 255) throw PpmFormatError("unsupported maxval " + std::to_string(maxval), maxval_at);

  const std::size_t count = static_cast<std::size_t>(width * height);
  std::vector<Rgb> pixels(count);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (in.at_end()) throw PpmFormatError("truncated pixel data", in.pos());
    in.advance(1);
    const std::string_view raw = in.rest();
    if (raw.size() < count * 3) throw PpmFormatError("truncated pixel data", in.pos() + raw.size());
    for (std::size_t i = 0; i < count; ++i) {
      pixels[i] = Rgb{static_cast<std::uint8_t>(raw[3 * i]), static_cast<std::uint8_t>(raw[3 * i + 1]),
                      static_cast<std::uint8_t>(raw[3 * i + 2])};
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint8_t channel[3];
      for (auto& c : channel) {
        in.skip_space_and_comments();
        if (in.at_end()) throw PpmFormatError("truncated pixel data", in.pos());
        const std::uint64_t v = in.read_uint("sample");
        const std::size_t at = in.token_start();
        if (v > 255) throw PpmFormatError("sample exceeds maxval", at);
        c = static_cast<std::uint8_t>(v);
      }
      pixels[i] = Rgb{channel[0], channel[1], channel[2]};
    }
  }
  return ImageRaster(static_cast<std::size_t>(width), static_cast<std::size_t>(height), std::move(pixels));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  if (file.bad()) throw IoError("read failure on " + path.string());
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  file.flush();
  if (!file) throw IoError("write failure on " + path.string());
}

ImageRaster load_ppm(const std::filesystem::path& path) {
  try {
    return parse_ppm(read_file(path));
  } catch (const PpmFormatError& e) {
    throw PpmFormatError(path.string() + ": " + e.what(), e.offset());
  }
}

std::string encode_ppm(const ImageRaster& image, bool binary) {
  std::string out = (binary ? "P6\n" : "P3\n") + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  if (binary) {
    out.reserve(out.size() + image.size() * 3);
    for (const Rgb& p : image.pixels()) {
      out.push_back(static_cast<char>(p.r));
      out.push_back(static_cast<char>(p.g));
      out.push_back(static_cast<char>(p.b));
    }
  } else {
    for (std::size_t y = 0; y < image.height(); ++y) {
      for (std::size_t x = 0; x < image.width(); ++x) {
        const Rgb& p = image.at(x, y);
        if (x) out += ' ';
        out += std::to_string(p.r) + ' ' + std::to_string(p.g) + ' ' + std::to_string(p.b);
      }
      out += '\n';
    }
  }
  return out;
}

void save_ppm(const ImageRaster& image, const std::filesystem::path& path, bool binary) {
  write_file(path, encode_ppm(image, binary));
}

ImageRaster render_label_map(const LabelRaster& labels) {
  labels.validate();
  std::vector<Rgb> pixels(labels.labels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const LabelId id = labels.labels[i];
    pixels[i] = id == kUnclassified ? Rgb{0, 0, 0} : labels.palette.at(id).color;
  }
  return ImageRaster(labels.width, labels.height, std::move(pixels));
}

void save_label_map(const LabelRaster& labels, const std::filesystem::path& path) {
  save_ppm(render_label_map(labels), path, true);
}

Palette parse_palette(std::string_view text) {
  Palette palette;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    long id = -1;
    std::string name;
    int r = -1, g = -1, b = -1;
    std::string extra;
    if (!(fields >> id >> name >> r >> g >> b) || (fields >> extra))
      throw DataError("palette line " + std::to_string(line_no) + ": expected `<id> <name> <r> <g> <b>`");
    if (id < 0 || id >= kUnclassified)
      throw DataError("palette line " + std::to_string(line_no) + ": id out of range");
    for (int c : {r, g, b}) {
      if (c < 0 || c > 255) throw DataError("palette line " + std::to_string(line_no) + ": color channel out of range");
    }
    const auto key = static_cast<LabelId>(id);
    if (palette.contains(key)) throw DataError("palette line " + std::to_string(line_no) + ": duplicate id " + std::to_string(id));
    palette.emplace(key, PaletteEntry{name, Rgb{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                                static_cast<std::uint8_t>(b)}});
  }
  return palette;
}

std::string encode_palette(const Palette& palette) {
  std::string out;
  for (const auto& [id, entry] : palette) {
    out += std::to_string(id) + ' ' + entry.name + ' ' + std::to_string(entry.color.r) + ' ' +
           std::to_string(entry.color.g) + ' ' + std::to_string(entry.color.b) + '\n';
  }
  return out;
}

Palette load_palette(const std::filesystem::path& path) { return parse_palette(read_file(path)); }

void save_palette(const Palette& palette, const std::filesystem::path& path) {
  write_file(path, encode_palette(palette));
}

LabelRaster decode_label_map(const ImageRaster& image, const Palette& palette) {
  std::map<Rgb, LabelId> by_color;
  for (const auto& [id, entry] : palette) {
    if (!by_color.emplace(entry.color, id).second)
      throw DataError("palette colors are not distinct; label map cannot be decoded");
  }
  LabelRaster out{image.width(), image.height(), std::vector<LabelId>(image.size()), palette};
  for (std::size_t i = 0; i < image.size(); ++i) {
    const auto it = by_color.find(image[i]);
    if (it != by_color.end()) {
      out.labels[i] = it->second;
    } else if (image[i] == Rgb{0, 0, 0}) {
      out.labels[i] = kUnclassified;
    } else {
      throw DataError("pixel " + std::to_string(i) + " has a color absent from the palette");
    }
  }
  return out;
}

std::filesystem::path palette_path_for(const std::filesystem::path& ppm_path) {
  auto p = ppm_path;
  p.replace_extension(".pal");
  return p;
}

}  // namespace roughclus
