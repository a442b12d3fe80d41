#include "hiershap/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "hiershap/errors.hpp"

namespace hiershap::io {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Netpbm header tokenizer that skips '#' comments.
class PnmHeader {
 public:
  explicit PnmHeader(const std::string& bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) throw InvalidInput("truncated PNM header");
    return bytes_.substr(start, pos_ - start);
  }

  int integer() {
    const std::string t = token();
    try {
      std::size_t used = 0;
      int v = std::stoi(t, &used);
      if (used != t.size() || v < 0) throw InvalidInput("bad PNM header field");
      return v;
    } catch (const std::logic_error&) {
      throw InvalidInput("bad PNM header field '" + t + "'");
    }
  }

  // Binary rasters start after exactly one whitespace byte.
  std::size_t raster_offset() const { return pos_ + 1; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  PnmHeader header(bytes);
  const std::string magic = header.token();
  if (magic != "P5" && magic != "P2" && magic != "P6") {
    throw InvalidInput("'" + path.string() + "' is not a P2/P5/P6 file");
  }
  const int width = header.integer();
  const int height = header.integer();
  const int maxval = header.integer();
  if (width == 0 || height == 0) throw InvalidInput("zero-sized image in '" + path.string() + "'");
  if (maxval == 0 || maxval > 65535) throw InvalidInput("bad PNM maxval");
  const int channels = magic == "P6" ? 3 : 1;
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  const double scale = 255.0 / maxval;

  std::vector<double> samples(n);
  if (magic == "P2") {
    for (auto& s : samples) s = header.integer() * scale;
  } else {
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    const std::size_t offset = header.raster_offset();
    if (bytes.size() < offset + n * bytes_per) {
      throw InvalidInput("truncated raster in '" + path.string() + "'");
    }
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = bytes_per == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
      samples[i] = v * scale;
    }
  }
  return Image(width, height, channels, std::move(samples));
}

Image read_png(const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!fp) throw InvalidInput("cannot open '" + path.string() + "'");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw InvalidInput("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InvalidInput("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InvalidInput("malformed PNG '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  std::vector<png_byte> raster(static_cast<std::size_t>(width) * height * channels);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = raster.data() + static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) throw InvalidInput("unsupported PNG channel layout");
  return Image(width, height, channels, std::vector<double>(raster.begin(), raster.end()));
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  char sig[8] = {};
  in.read(sig, sizeof(sig));
  if (static_cast<unsigned char>(sig[0]) == 0x89 && sig[1] == 'P' && sig[2] == 'N' &&
      sig[3] == 'G') {
    return read_png(path);
  }
  if (sig[0] == 'P') return read_pgm(path);
  throw InvalidInput("unrecognised image format for '" + path.string() + "'");
}

void write_pgm(const std::filesystem::path& path, const Grid<std::uint8_t>& gray) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << "P5\n" << gray.width() << ' ' << gray.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(gray.data().data()),
            static_cast<std::streamsize>(gray.size()));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& gray) {
  Grid<std::uint8_t> bytes(gray.width(), gray.height());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(std::clamp(std::lround(gray[i]), 0L, 255L));
  }
  write_pgm(path, bytes);
}

void write_png(const std::filesystem::path& path, const Image& image) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw InvalidInput("cannot write '" + path.string() + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw InvalidInput("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InvalidInput("failed writing PNG '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width(), image.height(), 8,
               image.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(image.width()) * image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        row[static_cast<std::size_t>(x) * image.channels() + c] =
            static_cast<png_byte>(std::clamp(std::lround(image.at(x, y, c)), 0L, 255L));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace hiershap::io
