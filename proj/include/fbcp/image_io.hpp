#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fbcp/tensor.hpp"

namespace fbcp {

/// 8-bit RGB raster, row-major, interleaved channels.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // height * width * 3

  std::uint8_t at(std::size_t row, std::size_t col, std::size_t channel) const {
    return pixels[(row * width + col) * 3 + channel];
  }
};

/// Reads any PNG, expanding palette, gray and 16-bit data to 8-bit RGB and
/// dropping alpha. Throws FormatError.
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// height x width x 3 tensor with values in [0, 1].
DenseTensor image_to_tensor(const RgbImage& image);
/// Clamps to [0, 1] and rounds to 8 bits. Expects height x width x 3.
RgbImage tensor_to_image(const DenseTensor& t);

}  // namespace fbcp
