#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "fbcp/inference.hpp"

namespace fbcp {

using RowMixer = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-stochastic Gaussian neighbourhood weights w_ij ~ exp(-(i - j)^2).
/// Entries that underflow are not stored; beyond 2048 rows the profile is cut
/// at |i - j| > 6 before normalizing.
RowMixer build_weights(std::size_t extent);

/// One optional mixing matrix per mode; modes without one are left alone.
struct MixtureWeights {
  std::vector<std::optional<RowMixer>> per_mode;

  static MixtureWeights for_modes(const Shape& shape, const std::vector<std::size_t>& modes);
  bool enabled(std::size_t mode) const {
    return mode < per_mode.size() && per_mode[mode].has_value();
  }
};

/// Replaces the factor means of `mode` by W times the means. Covariances stay.
void apply_mixture(ModelState& state, const MixtureWeights& weights, std::size_t mode);

/// fit with the means of each listed mode (0-based) smoothed after its update.
FitResult fit_mp(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg,
                 const std::vector<std::size_t>& smooth_modes);

}  // namespace fbcp
