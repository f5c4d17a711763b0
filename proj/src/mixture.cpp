#include "fbcp/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbcp/errors.hpp"

namespace fbcp {

namespace {

constexpr std::size_t kDenseLimit = 2048;
constexpr std::ptrdiff_t kTruncatedReach = 6;

}  // namespace

RowMixer build_weights(std::size_t extent) {
  if (extent < 1) throw InvalidArgument("mixture extent must be at least 1");
  const auto n = static_cast<std::ptrdiff_t>(extent);
  std::ptrdiff_t reach = kTruncatedReach;
  if (extent <= kDenseLimit) {
    reach = 0;
    while (std::exp(-static_cast<double>((reach + 1) * (reach + 1))) > 0.0) ++reach;
  }

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(extent * static_cast<std::size_t>(2 * reach + 1));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - reach);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + reach);
    double total = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) total += std::exp(-static_cast<double>((i - j) * (i - j)));
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double w = std::exp(-static_cast<double>((i - j) * (i - j))) / total;
      if (w > 0.0) entries.emplace_back(i, j, w);
    }
  }
  RowMixer w(n, n);
  w.setFromTriplets(entries.begin(), entries.end());
  return w;
}

MixtureWeights MixtureWeights::for_modes(const Shape& shape,
                                         const std::vector<std::size_t>& modes) {
  MixtureWeights out;
  out.per_mode.resize(shape.order());
  for (std::size_t m : modes) {
    if (m >= shape.order()) {
      throw InvalidArgument("smoothing mode " + std::to_string(m + 1) + " exceeds tensor order " +
                            std::to_string(shape.order()));
    }
    if (!out.per_mode[m]) out.per_mode[m] = build_weights(shape[m]);
  }
  return out;
}

void apply_mixture(ModelState& state, const MixtureWeights& weights, std::size_t mode) {
  if (!weights.enabled(mode)) return;
  const RowMixer& w = *weights.per_mode[mode];
  FactorPosterior& f = state.factors.at(mode);
  if (static_cast<std::size_t>(w.cols()) != f.rows()) {
    throw ShapeError("mixing matrix for mode " + std::to_string(mode + 1) + " has " +
                     std::to_string(w.cols()) + " columns, factor has " +
                     std::to_string(f.rows()) + " rows");
  }
  f.mean = (w * f.mean).eval();
  f.refresh_quad();
}

FitResult fit_mp(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg,
                 const std::vector<std::size_t>& smooth_modes) {
  const MixtureWeights weights = MixtureWeights::for_modes(y.shape(), smooth_modes);
  return fit(y, mask, cfg, [&weights](ModelState& state, std::size_t mode) {
    apply_mixture(state, weights, mode);
  });
}

}  // namespace fbcp
