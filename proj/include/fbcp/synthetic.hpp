#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "fbcp/multilinear.hpp"
#include "fbcp/tensor.hpp"

namespace fbcp {

/// Either a target SNR in dB against the sample variance of the clean tensor,
/// or an absolute noise variance. An infinite SNR switches noise off.
struct NoiseSpec {
  enum class Kind { kSnrDb, kVariance };
  Kind kind = Kind::kSnrDb;
  double value = std::numeric_limits<double>::infinity();

  static NoiseSpec snr_db(double db) { return {Kind::kSnrDb, db}; }
  static NoiseSpec variance(double v) { return {Kind::kVariance, v}; }
  static NoiseSpec none() { return {Kind::kVariance, 0.0}; }
};

struct SyntheticInstance {
  DenseTensor truth;
  DenseTensor observed;  // truth + noise at every position
  ObservationMask mask;
  std::vector<FactorMatrix> factors;
  std::size_t true_rank = 0;
  double snr_db = 0.0;  // realized: 10 log10(var(X) / noise variance)
  double noise_variance = 0.0;
  double missing_ratio = 0.0;
  std::uint64_t seed = 0;
};

/// Standard-normal factors, X = [[A]], i.i.d. Gaussian noise, and exactly
/// round((1 - missing_ratio) * numel) observed positions drawn without replacement.
SyntheticInstance generate_synthetic(const Shape& shape, std::size_t rank, NoiseSpec noise,
                                     double missing_ratio, std::uint64_t seed);

/// Population variance of the entries.
double sample_variance(const DenseTensor& t);

}  // namespace fbcp
