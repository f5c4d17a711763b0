#include "fbcp/model.hpp"

#include <cmath>
#include <string>

#include "fbcp/errors.hpp"

namespace fbcp {

void PriorConfig::validate() const {
  if (!(a0 > 0 && b0 > 0 && c0 > 0 && d0 > 0)) {
    throw InvalidArgument("Gamma hyperparameters a0, b0, c0, d0 must be positive");
  }
  if (init_rank < 1) throw InvalidArgument("init_rank must be at least 1");
  if (init_rank > kMaxRank) {
    throw InvalidArgument("init_rank " + std::to_string(init_rank) + " exceeds the cap of " +
                          std::to_string(kMaxRank));
  }
  if (!(working_power >= 0 && std::isfinite(working_power))) {
    throw InvalidArgument("working_power must be finite and nonnegative");
  }
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(tol > 0)) throw InvalidArgument("tol must be positive");
  if (!(prune_tol >= 0 && prune_tol < 1)) throw InvalidArgument("prune_tol must lie in [0, 1)");
}

void FactorPosterior::refresh_quad_row(std::size_t i) {
  const Eigen::Index r = mean.cols();
  Eigen::Map<Matrix> dst(quad.data() + i * static_cast<std::size_t>(r * r), r, r);
  const auto row = mean.row(static_cast<Eigen::Index>(i));
  dst.noalias() = row.transpose() * row;
  dst += row_cov[i];
}

void FactorPosterior::refresh_quad() {
  const Eigen::Index r = mean.cols();
  quad.resize(mean.rows(), r * r);
  for (std::size_t i = 0; i < rows(); ++i) refresh_quad_row(i);
}

ObservedData::ObservedData(DenseTensor y_in, ObservationMask mask_in, double scale_in)
    : y(std::move(y_in)), mask(std::move(mask_in)), scale(scale_in) {
  if (y.shape() != mask.shape()) {
    throw ShapeError("tensor shape " + y.shape().to_string() + " does not match mask shape " +
                     mask.shape().to_string());
  }
  if (!(scale > 0 && std::isfinite(scale))) throw InvalidArgument("data scale must be positive");
  if (scale != 1.0) {
    for (double& v : y.values()) v *= scale;
  }
  values.reserve(mask.count());
  for (std::size_t p : mask.positions()) {
    if (!std::isfinite(y[p])) {
      throw NumericError("observed entry " + std::to_string(p) + " is not finite");
    }
    values.push_back(y[p]);
    sq_norm += y[p] * y[p];
  }
}

std::vector<FactorMatrix> ModelState::means() const {
  std::vector<FactorMatrix> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(f.mean);
  return out;
}

}  // namespace fbcp
