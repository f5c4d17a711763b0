#include "fbcp/metrics.hpp"

#include <cmath>
#include <limits>

#include "fbcp/errors.hpp"

namespace fbcp {

namespace {

void check_shapes(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("shapes " + a.shape().to_string() + " and " + b.shape().to_string() +
                     " differ");
  }
}

double ratio(double num, double den) {
  if (den == 0.0) throw InvalidArgument("relative error undefined: reference norm is zero");
  return std::sqrt(num / den);
}

}  // namespace

double rse(const DenseTensor& estimate, const DenseTensor& truth) {
  check_shapes(estimate, truth);
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < truth.numel(); ++p) {
    const double d = estimate[p] - truth[p];
    num += d * d;
    den += truth[p] * truth[p];
  }
  return ratio(num, den);
}

double rse(const DenseTensor& estimate, const DenseTensor& truth, const ObservationMask& subset) {
  check_shapes(estimate, truth);
  if (subset.shape() != truth.shape()) throw ShapeError("subset mask shape differs");
  double num = 0.0, den = 0.0;
  for (std::size_t p : subset.positions()) {
    const double d = estimate[p] - truth[p];
    num += d * d;
    den += truth[p] * truth[p];
  }
  return ratio(num, den);
}

double psnr(const DenseTensor& estimate, const DenseTensor& truth, double peak) {
  check_shapes(estimate, truth);
  if (!(peak > 0.0)) throw InvalidArgument("peak must be positive");
  double se = 0.0;
  for (std::size_t p = 0; p < truth.numel(); ++p) {
    const double d = estimate[p] - truth[p];
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(truth.numel());
  return 10.0 * std::log10(peak * peak / mse);
}

ObservationMask complement(const ObservationMask& mask) {
  std::vector<std::uint8_t> flags(mask.flags().begin(), mask.flags().end());
  for (auto& f : flags) f = f ? 0 : 1;
  return ObservationMask(mask.shape(), std::move(flags));
}

}  // namespace fbcp
