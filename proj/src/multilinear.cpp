#include "fbcp/multilinear.hpp"

#include <string>

#include "fbcp/errors.hpp"

namespace fbcp {

namespace {

void check_mode(const Shape& shape, std::size_t mode) {
  if (mode >= shape.order()) {
    throw InvalidArgument("mode " + std::to_string(mode) + " out of range for order " +
                          std::to_string(shape.order()));
  }
}

// Column of element `idx` in the mode-n unfolding.
std::size_t unfolded_column(const Shape& shape, std::span<const std::size_t> idx,
                            std::size_t mode) {
  std::size_t col = 0;
  std::size_t stride = 1;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    if (k == mode) continue;
    col += idx[k] * stride;
    stride *= shape[k];
  }
  return col;
}

}  // namespace

Matrix unfold(const DenseTensor& t, std::size_t mode) {
  const Shape& shape = t.shape();
  check_mode(shape, mode);
  Matrix out(shape[mode], shape.numel_except(mode));
  Index idx{};
  for (std::size_t p = 0; p < t.numel(); ++p) {
    shape.multi_index(p, idx);
    out(idx[mode], unfolded_column(shape, idx, mode)) = t[p];
  }
  return out;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  check_mode(shape, mode);
  if (static_cast<std::size_t>(m.rows()) != shape[mode] ||
      static_cast<std::size_t>(m.cols()) != shape.numel_except(mode)) {
    throw ShapeError("cannot fold " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     " matrix into shape " + shape.to_string() + " along mode " +
                     std::to_string(mode));
  }
  DenseTensor t(shape);
  Index idx{};
  for (std::size_t p = 0; p < t.numel(); ++p) {
    shape.multi_index(p, idx);
    t[p] = m(idx[mode], unfolded_column(shape, idx, mode));
  }
  return t;
}

Matrix khatri_rao(std::span<const Matrix> mats) {
  if (mats.empty()) throw InvalidArgument("khatri_rao of an empty list");
  const Eigen::Index cols = mats[0].cols();
  for (const auto& m : mats) {
    if (m.cols() != cols) throw ShapeError("khatri_rao operands differ in column count");
  }
  Matrix out = mats[0];
  for (std::size_t j = 1; j < mats.size(); ++j) {
    const Matrix& b = mats[j];
    Matrix next(out.rows() * b.rows(), cols);
    for (Eigen::Index r = 0; r < cols; ++r) {
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        next.col(r).segment(i * b.rows(), b.rows()) = out(i, r) * b.col(r);
      }
    }
    out = std::move(next);
  }
  return out;
}

Matrix khatri_rao_reverse(std::span<const Matrix> mats) {
  std::vector<Matrix> reversed(mats.rbegin(), mats.rend());
  return khatri_rao(reversed);
}

Matrix khatri_rao_except(std::span<const Matrix> mats, std::size_t skip) {
  std::vector<Matrix> rest;
  for (std::size_t k = mats.size(); k-- > 0;) {
    if (k != skip) rest.push_back(mats[k]);
  }
  return khatri_rao(rest);
}

Matrix hadamard(std::span<const Matrix> mats) {
  if (mats.empty()) throw InvalidArgument("hadamard of an empty list");
  Matrix out = mats[0];
  for (std::size_t j = 1; j < mats.size(); ++j) {
    if (mats[j].rows() != out.rows() || mats[j].cols() != out.cols()) {
      throw ShapeError("hadamard operands differ in shape");
    }
    out.array() *= mats[j].array();
  }
  return out;
}

DenseTensor kruskal(std::span<const FactorMatrix> factors) {
  if (factors.empty()) throw InvalidArgument("kruskal of an empty factor list");
  const Eigen::Index rank = factors[0].cols();
  std::vector<std::size_t> dims;
  for (const auto& f : factors) {
    if (f.cols() != rank) throw ShapeError("kruskal factors differ in column count");
    dims.push_back(static_cast<std::size_t>(f.rows()));
  }
  // vec(X) = (A_N (.) ... (.) A_1) 1_R, accumulated mode by mode.
  Matrix acc = factors[0];
  for (std::size_t n = 1; n < factors.size(); ++n) {
    const FactorMatrix& f = factors[n];
    Matrix next(acc.rows() * f.rows(), rank);
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      next.middleRows(i * acc.rows(), acc.rows()) = acc * f.row(i).asDiagonal();
    }
    acc = std::move(next);
  }
  Vector v = acc.rowwise().sum();
  return DenseTensor(Shape(std::move(dims)), std::vector<double>(v.data(), v.data() + v.size()));
}

double generalized_inner_product(std::span<const Vector> vecs) {
  if (vecs.empty()) throw InvalidArgument("generalized inner product of an empty list");
  Vector prod = vecs[0];
  for (std::size_t j = 1; j < vecs.size(); ++j) {
    if (vecs[j].size() != prod.size()) throw ShapeError("vector lengths differ");
    prod.array() *= vecs[j].array();
  }
  return prod.sum();
}

double masked_sq_frobenius(const DenseTensor& t, const ObservationMask& mask) {
  if (t.shape() != mask.shape()) throw ShapeError("tensor and mask shapes differ");
  double s = 0.0;
  for (std::size_t p : mask.positions()) s += t[p] * t[p];
  return s;
}

}  // namespace fbcp
