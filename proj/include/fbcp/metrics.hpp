#pragma once

#include <optional>

#include "fbcp/tensor.hpp"

namespace fbcp {

/// ||estimate - truth||_F / ||truth||_F, optionally over the flagged subset only.
double rse(const DenseTensor& estimate, const DenseTensor& truth);
double rse(const DenseTensor& estimate, const DenseTensor& truth, const ObservationMask& subset);

/// 10 log10(peak^2 / MSE); +infinity when the estimate is exact.
double psnr(const DenseTensor& estimate, const DenseTensor& truth, double peak);

/// Mask flagging the positions that `mask` leaves unobserved.
ObservationMask complement(const ObservationMask& mask);

}  // namespace fbcp
