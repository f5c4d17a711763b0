#include "fbcp/tensor.hpp"

#include <limits>
#include <sstream>

#include "fbcp/errors.hpp"

namespace fbcp {

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ShapeError("shape must have at least one mode");
  if (dims_.size() > kMaxOrder) {
    throw ShapeError("tensor order " + std::to_string(dims_.size()) + " exceeds " +
                     std::to_string(kMaxOrder));
  }
  numel_ = 1;
  for (std::size_t d : dims_) {
    if (d == 0) throw ShapeError("shape extents must be positive");
    if (numel_ > std::numeric_limits<std::uint32_t>::max() / d) {
      throw ShapeError("element count overflows");
    }
    numel_ *= d;
  }
}

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

std::size_t Shape::linear_index(std::span<const std::size_t> idx) const {
  std::size_t linear = 0;
  std::size_t stride = 1;
  for (std::size_t n = 0; n < dims_.size(); ++n) {
    linear += idx[n] * stride;
    stride *= dims_[n];
  }
  return linear;
}

void Shape::multi_index(std::size_t linear, std::span<std::size_t> out) const {
  for (std::size_t n = 0; n < dims_.size(); ++n) {
    out[n] = linear % dims_[n];
    linear /= dims_[n];
  }
}

std::string Shape::to_string() const {
  std::ostringstream os;
  for (std::size_t n = 0; n < dims_.size(); ++n) {
    if (n) os << 'x';
    os << dims_[n];
  }
  return os.str();
}

Shape parse_shape(const std::string& text) {
  std::vector<std::size_t> dims;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('x', start);
    if (end == std::string::npos) end = text.size();
    const std::string token = text.substr(start, end - start);
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidArgument("malformed shape '" + text + "'");
    }
    dims.push_back(std::stoull(token));
    start = end + 1;
  }
  try {
    return Shape(std::move(dims));
  } catch (const ShapeError& e) {
    throw InvalidArgument(std::string("malformed shape: ") + e.what());
  }
}

DenseTensor::DenseTensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_.numel(), fill) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_.numel()) {
    throw ShapeError("buffer of length " + std::to_string(values_.size()) +
                     " does not match shape " + shape_.to_string());
  }
}

ObservationMask::ObservationMask(Shape shape, std::vector<std::uint8_t> flags)
    : shape_(std::move(shape)), flags_(std::move(flags)) {
  if (flags_.size() != shape_.numel()) {
    throw ShapeError("mask buffer does not match shape " + shape_.to_string());
  }
  const std::size_t order = shape_.order();
  for (auto& f : flags_) f = f ? 1 : 0;

  for (std::size_t p = 0; p < flags_.size(); ++p) {
    if (flags_[p]) positions_.push_back(p);
  }
  indices_.resize(positions_.size() * order);
  slice_offsets_.assign(order, {});
  slice_entries_.assign(order, {});
  for (std::size_t n = 0; n < order; ++n) slice_offsets_[n].assign(shape_[n] + 1, 0);

  Index idx{};
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    shape_.multi_index(positions_[k], idx);
    for (std::size_t n = 0; n < order; ++n) {
      indices_[k * order + n] = static_cast<std::uint32_t>(idx[n]);
      ++slice_offsets_[n][idx[n] + 1];
    }
  }
  // counts -> offsets, then bucket observations (ascending k within each slice)
  for (std::size_t n = 0; n < order; ++n) {
    auto& off = slice_offsets_[n];
    for (std::size_t i = 1; i < off.size(); ++i) off[i] += off[i - 1];
    slice_entries_[n].resize(positions_.size());
    std::vector<std::size_t> cursor(off.begin(), off.end() - 1);
    for (std::size_t k = 0; k < positions_.size(); ++k) {
      slice_entries_[n][cursor[indices_[k * order + n]]++] = static_cast<std::uint32_t>(k);
    }
  }
}

ObservationMask ObservationMask::full(const Shape& shape) {
  return ObservationMask(shape, std::vector<std::uint8_t>(shape.numel(), 1));
}

}  // namespace fbcp
