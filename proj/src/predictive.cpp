#include "fbcp/predictive.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "fbcp/errors.hpp"
#include "fbcp/inference.hpp"

namespace fbcp {

double StudentTPrediction::variance() const {
  if (dof <= 2.0) return std::numeric_limits<double>::infinity();
  return dof / (dof - 2.0) / scale;
}

std::pair<double, double> StudentTPrediction::central_interval(double coverage) const {
  if (!(coverage > 0.0 && coverage < 1.0)) throw InvalidArgument("coverage must lie in (0, 1)");
  const boost::math::students_t dist(dof);
  const double half = boost::math::quantile(dist, 0.5 + 0.5 * coverage) / std::sqrt(scale);
  return {mean - half, mean + half};
}

namespace {

StudentTPrediction predict_unchecked(const ModelState& state, const std::size_t* index) {
  const std::size_t order = state.order();
  const Eigen::Index rank = static_cast<Eigen::Index>(state.rank());
  const double unit = state.data->scale;

  StudentTPrediction out;
  out.dof = 2.0 * state.tau.shape;
  double inv_scale = state.tau.rate / state.tau.shape;
  if (rank == 0) {
    out.scale = unit * unit / inv_scale;
    return out;
  }
  Vector full = Vector::Ones(rank);
  for (std::size_t n = 0; n < order; ++n) {
    full.array() *= state.factors[n].mean.row(static_cast<Eigen::Index>(index[n])).transpose().array();
  }
  out.mean = full.sum() / unit;
  for (std::size_t n = 0; n < order; ++n) {
    Vector others = Vector::Ones(rank);
    for (std::size_t k = 0; k < order; ++k) {
      if (k == n) continue;
      others.array() *=
          state.factors[k].mean.row(static_cast<Eigen::Index>(index[k])).transpose().array();
    }
    inv_scale += others.dot(state.factors[n].row_cov[index[n]] * others);
  }
  out.scale = unit * unit / inv_scale;
  return out;
}

}  // namespace

StudentTPrediction predict_entry(const ModelState& state, std::span<const std::size_t> index) {
  const Shape& shape = state.shape();
  if (index.size() != shape.order()) {
    throw InvalidArgument("index has " + std::to_string(index.size()) + " components, tensor order is " +
                          std::to_string(shape.order()));
  }
  for (std::size_t n = 0; n < index.size(); ++n) {
    if (index[n] >= shape[n]) {
      throw InvalidArgument("index " + std::to_string(index[n]) + " out of range in mode " +
                            std::to_string(n + 1));
    }
  }
  return predict_unchecked(state, index.data());
}

MissingPrediction predict_missing(const ModelState& state, const ObservationMask& mask) {
  if (mask.shape() != state.shape()) {
    throw ShapeError("mask shape " + mask.shape().to_string() + " does not match model shape " +
                     state.shape().to_string());
  }
  MissingPrediction out{reconstruct(state), DenseTensor(state.shape())};
  const Shape& shape = state.shape();
  for (std::size_t p = 0; p < shape.numel(); ++p) {
    if (mask.observed(p)) continue;
    Index idx{};
    shape.multi_index(p, std::span(idx.data(), shape.order()));
    out.variance[p] = predict_unchecked(state, idx.data()).variance();
  }
  return out;
}

}  // namespace fbcp
