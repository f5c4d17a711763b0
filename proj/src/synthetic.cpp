#include "fbcp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fbcp/errors.hpp"

namespace fbcp {

double sample_variance(const DenseTensor& t) {
  const auto v = t.values();
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / n;
}

SyntheticInstance generate_synthetic(const Shape& shape, std::size_t rank, NoiseSpec noise,
                                     double missing_ratio, std::uint64_t seed) {
  if (rank < 1) throw InvalidArgument("rank must be at least 1");
  if (!(missing_ratio >= 0.0 && missing_ratio < 1.0)) {
    throw InvalidArgument("missing ratio must lie in [0, 1)");
  }
  const std::size_t total = shape.numel();
  const auto observed_count =
      static_cast<std::size_t>(std::llround((1.0 - missing_ratio) * static_cast<double>(total)));
  if (observed_count < 1) throw InvalidArgument("missing ratio leaves no observed entries");
  if (noise.kind == NoiseSpec::Kind::kVariance && !(noise.value >= 0.0)) {
    throw InvalidArgument("noise variance must be nonnegative");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);

  SyntheticInstance inst;
  inst.true_rank = rank;
  inst.seed = seed;
  for (std::size_t n = 0; n < shape.order(); ++n) {
    FactorMatrix a(static_cast<Eigen::Index>(shape[n]), static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index r = 0; r < a.cols(); ++r) a(i, r) = standard(rng);
    inst.factors.push_back(std::move(a));
  }
  inst.truth = kruskal(inst.factors);

  const double signal_var = sample_variance(inst.truth);
  if (noise.kind == NoiseSpec::Kind::kSnrDb) {
    inst.noise_variance = std::isinf(noise.value) && noise.value > 0
                              ? 0.0
                              : signal_var * std::pow(10.0, -noise.value / 10.0);
  } else {
    inst.noise_variance = noise.value;
  }
  inst.snr_db = inst.noise_variance > 0.0 ? 10.0 * std::log10(signal_var / inst.noise_variance)
                                          : std::numeric_limits<double>::infinity();

  inst.observed = inst.truth;
  if (inst.noise_variance > 0.0) {
    std::normal_distribution<double> eps(0.0, std::sqrt(inst.noise_variance));
    for (double& v : inst.observed.values()) v += eps(rng);
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < observed_count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::uint8_t> flags(total, 0);
  for (std::size_t i = 0; i < observed_count; ++i) flags[order[i]] = 1;
  inst.mask = ObservationMask(shape, std::move(flags));
  inst.missing_ratio = 1.0 - static_cast<double>(observed_count) / static_cast<double>(total);
  return inst;
}

}  // namespace fbcp
