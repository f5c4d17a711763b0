#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fbcp {

inline constexpr std::size_t kMaxOrder = 8;

using Index = std::array<std::size_t, kMaxOrder>;

/// Extents I_1..I_N of a dense tensor. Zero-based modes throughout the library.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> dims);
  Shape(std::initializer_list<std::size_t> dims);

  std::size_t order() const { return dims_.size(); }
  std::size_t operator[](std::size_t mode) const { return dims_[mode]; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t numel() const { return numel_; }

  /// Column-major: the first index varies fastest.
  std::size_t linear_index(std::span<const std::size_t> idx) const;
  void multi_index(std::size_t linear, std::span<std::size_t> out) const;

  /// Product of all extents except `mode`.
  std::size_t numel_except(std::size_t mode) const { return numel_ / dims_[mode]; }

  std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t numel_ = 0;
};

/// Parses "I1xI2x...xIN".
Shape parse_shape(const std::string& text);

class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape, double fill = 0.0);
  DenseTensor(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.order(); }
  std::size_t numel() const { return values_.size(); }

  double operator[](std::size_t linear) const { return values_[linear]; }
  double& operator[](std::size_t linear) { return values_[linear]; }
  double at(std::span<const std::size_t> idx) const { return values_[shape_.linear_index(idx)]; }
  double& at(std::span<const std::size_t> idx) { return values_[shape_.linear_index(idx)]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

/// Indicator of observed entries plus per-mode slice caches.
///
/// Observations are numbered 0..M-1 in ascending linear position. For every
/// mode n and slice index i, `slice(n, i)` lists the observation numbers whose
/// mode-n index equals i; `observed_index(k)` returns the multi-index of
/// observation k.
class ObservationMask {
 public:
  ObservationMask() = default;
  ObservationMask(Shape shape, std::vector<std::uint8_t> flags);
  static ObservationMask full(const Shape& shape);

  const Shape& shape() const { return shape_; }
  std::size_t count() const { return positions_.size(); }
  bool observed(std::size_t linear) const { return flags_[linear] != 0; }
  std::span<const std::uint8_t> flags() const { return flags_; }

  std::span<const std::size_t> positions() const { return positions_; }
  std::span<const std::uint32_t> observed_index(std::size_t k) const {
    return {indices_.data() + k * shape_.order(), shape_.order()};
  }
  std::span<const std::uint32_t> slice(std::size_t mode, std::size_t i) const {
    const auto& off = slice_offsets_[mode];
    return {slice_entries_[mode].data() + off[i], off[i + 1] - off[i]};
  }

  friend bool operator==(const ObservationMask& a, const ObservationMask& b) {
    return a.shape_ == b.shape_ && a.flags_ == b.flags_;
  }

 private:
  Shape shape_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::size_t> positions_;
  std::vector<std::uint32_t> indices_;
  std::vector<std::vector<std::size_t>> slice_offsets_;
  std::vector<std::vector<std::uint32_t>> slice_entries_;
};

}  // namespace fbcp
