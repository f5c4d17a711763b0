#pragma once

#include <span>

#include "fbcp/model.hpp"

namespace fbcp {

/// Marginal predictive distribution of one entry: a Student-t with location
/// `mean`, precision `scale` and `dof` degrees of freedom.
struct StudentTPrediction {
  double mean = 0.0;
  double scale = 1.0;
  double dof = 1.0;

  /// dof / (dof - 2) / scale, or +inf when dof <= 2.
  double variance() const;
  /// Symmetric interval holding `coverage` of the predictive mass.
  std::pair<double, double> central_interval(double coverage) const;
};

/// Predictive distribution at a multi-index, in the units of the input data.
StudentTPrediction predict_entry(const ModelState& state, std::span<const std::size_t> index);

struct MissingPrediction {
  DenseTensor mean;      // reconstruction everywhere
  DenseTensor variance;  // predictive variance on missing entries, 0 on observed ones
};

MissingPrediction predict_missing(const ModelState& state, const ObservationMask& mask);

}  // namespace fbcp
