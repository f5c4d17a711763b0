#include "fbcp/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

#include "fbcp/errors.hpp"

namespace fbcp {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw FormatError("cannot read PNG " + path.string() + ": " + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  RgbImage out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  File file(std::fopen(path.c_str(), "wb"));
  if (!file) throw FormatError("cannot open " + path.string() + " for writing");
  if (!png_image_write_to_stdio(&img, file.get(), 0, image.pixels.data(), 0, nullptr)) {
    throw FormatError("cannot encode PNG " + path.string() + ": " + img.message);
  }
}

DenseTensor image_to_tensor(const RgbImage& image) {
  DenseTensor t(Shape{image.height, image.width, 3});
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t col = 0; col < image.width; ++col)
      for (std::size_t row = 0; row < image.height; ++row)
        t[row + image.height * (col + image.width * c)] = image.at(row, col, c) / 255.0;
  return t;
}

RgbImage tensor_to_image(const DenseTensor& t) {
  const Shape& s = t.shape();
  if (s.order() != 3 || s[2] != 3) {
    throw ShapeError("image tensor must be height x width x 3, got " + s.to_string());
  }
  RgbImage out{s[1], s[0], std::vector<std::uint8_t>(s.numel())};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t col = 0; col < out.width; ++col)
      for (std::size_t row = 0; row < out.height; ++row) {
        const double v = std::clamp(t[row + out.height * (col + out.width * c)], 0.0, 1.0);
        out.pixels[(row * out.width + col) * 3 + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
  return out;
}

}  // namespace fbcp
