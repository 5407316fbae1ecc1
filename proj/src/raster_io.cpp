#include "lanemap/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "lanemap/error.hpp"

namespace lanemap {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors with longjmp; these helpers keep only trivially
// destructible locals between setjmp and the libpng calls.
struct PngError {
  char message[256] = {};
};

void png_fail(png_structp png, png_const_charp message) {
  auto* err = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(err->message, sizeof(err->message), "%s", message);
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

bool encode_rgb(std::FILE* file, const png_byte* pixels, int w, int h, PngError* err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, err, png_fail, png_warn);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int v = 0; v < h; ++v) {
    png_write_row(png, pixels + static_cast<std::size_t>(v) * w * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

// Pass 1 (pixels == nullptr) reads the header; pass 2 decodes into `pixels`.
bool decode_rgb(std::FILE* file, png_byte* pixels, int* w, int* h, PngError* err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, png_fail, png_warn);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  *w = static_cast<int>(png_get_image_width(png, info));
  *h = static_cast<int>(png_get_image_height(png, info));
  if (pixels == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
  }
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  if (png_get_channels(png, info) != 3) {
    std::snprintf(err->message, sizeof(err->message), "expected an RGB image");
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  for (int v = 0; v < *h; ++v) {
    png_read_row(png, pixels + static_cast<std::size_t>(v) * (*w) * 3, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

double parse_number(const std::string& token, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line) +
                                       ": bad number '" + token + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorKind::kIo, "cannot format number");
  return std::string(buf, ptr);
}

void write_lane_png(const std::filesystem::path& path, const LaneImage& img) {
  const int w = img.width();
  const int h = img.height();
  std::vector<png_byte> pixels(static_cast<std::size_t>(w) * h * 3);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      for (int c = 0; c < kNumLaneClasses; ++c) {
        const double value = std::clamp(static_cast<double>(img.at(c, u, v)), 0.0, 1.0);
        pixels[(static_cast<std::size_t>(v) * w + u) * 3 + c] =
            static_cast<png_byte>(std::lround(255.0 * value));
      }
    }
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  PngError err;
  if (!encode_rgb(file.get(), pixels.data(), w, h, &err)) {
    throw Error(ErrorKind::kIo, path.string() + ": " + err.message);
  }
}

LaneImage read_lane_png(const std::filesystem::path& path, const TileSpec& tile) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  PngError err;
  int w = 0;
  int h = 0;
  if (!decode_rgb(file.get(), nullptr, &w, &h, &err)) {
    throw Error(ErrorKind::kParse, path.string() + ": " + err.message);
  }
  if (w != tile.width || h != tile.height) {
    throw Error(ErrorKind::kDimensionMismatch,
                path.string() + ": image is " + std::to_string(w) + "x" + std::to_string(h) +
                    ", manifest says " + std::to_string(tile.width) + "x" +
                    std::to_string(tile.height));
  }
  std::rewind(file.get());
  std::vector<png_byte> pixels(static_cast<std::size_t>(w) * h * 3);
  if (!decode_rgb(file.get(), pixels.data(), &w, &h, &err)) {
    throw Error(ErrorKind::kParse, path.string() + ": " + err.message);
  }
  LaneImage img(tile);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      for (int c = 0; c < kNumLaneClasses; ++c) {
        img.at(c, u, v) =
            static_cast<float>(pixels[(static_cast<std::size_t>(v) * w + u) * 3 + c] / 255.0);
      }
    }
  }
  return img;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& e : entries) {
    out << e.tile_id << ' ' << format_double(e.tile.center.x) << ' '
        << format_double(e.tile.center.y) << ' ' << format_double(e.tile.heading) << ' '
        << format_double(e.tile.pixel_size) << ' ' << e.tile.width << ' ' << e.tile.height
        << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string id, x, y, heading, p, w, h, extra;
    if (!(fields >> id >> x >> y >> heading >> p >> w >> h) || (fields >> extra)) {
      throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) +
                                         ": expected 'tile_id x y heading p w h'");
    }
    ManifestEntry e;
    e.tile_id = id;
    e.tile.center = {parse_number(x, path, line_no), parse_number(y, path, line_no)};
    e.tile.heading = parse_number(heading, path, line_no);
    e.tile.pixel_size = parse_number(p, path, line_no);
    const double wd = parse_number(w, path, line_no);
    const double hd = parse_number(h, path, line_no);
    if (wd != std::floor(wd) || hd != std::floor(hd) || wd <= 0 || hd <= 0) {
      throw Error(ErrorKind::kParse,
                  path.string() + ":" + std::to_string(line_no) + ": bad tile dimensions");
    }
    e.tile.width = static_cast<std::int32_t>(wd);
    e.tile.height = static_cast<std::int32_t>(hd);
    try {
      validate(e.tile);
    } catch (const Error& err) {
      throw Error(ErrorKind::kParse,
                  path.string() + ":" + std::to_string(line_no) + ": " + err.what());
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string make_tile_id(const std::string& road_id, std::size_t index) {
  std::ostringstream s;
  s << road_id << ':' << std::setw(5) << std::setfill('0') << index;
  return s.str();
}

std::string road_id_of_tile(const std::string& tile_id) {
  const auto pos = tile_id.rfind(':');
  if (pos == std::string::npos || pos == 0) {
    throw Error(ErrorKind::kParse, "tile id '" + tile_id + "' lacks a '<road>:<index>' form");
  }
  return tile_id.substr(0, pos);
}

std::string tile_png_name(const std::string& tile_id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string name;
  for (const unsigned char ch : tile_id) {
    if (std::isalnum(ch) || ch == '-' || ch == '_' || ch == '.') {
      name.push_back(static_cast<char>(ch));
    } else {
      name.push_back('%');
      name.push_back(kHex[ch >> 4]);
      name.push_back(kHex[ch & 0xF]);
    }
  }
  return name + ".png";
}

}  // namespace lanemap
