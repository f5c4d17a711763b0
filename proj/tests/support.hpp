#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fbcp/inference.hpp"
#include "fbcp/multilinear.hpp"
#include "fbcp/tensor.hpp"

namespace fbcp::test {

inline DenseTensor random_tensor(const Shape& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseTensor t(shape);
  for (double& v : t.values()) v = g(rng);
  return t;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline ObservationMask random_mask(const Shape& shape, double observed_fraction,
                                   std::mt19937_64& rng) {
  std::bernoulli_distribution keep(observed_fraction);
  std::vector<std::uint8_t> flags(shape.numel());
  for (auto& f : flags) f = keep(rng) ? 1 : 0;
  flags[0] = 1;
  return ObservationMask(shape, std::move(flags));
}

inline Matrix random_spd(Eigen::Index r, double scale, std::mt19937_64& rng) {
  const Matrix a = random_matrix(r, r, rng);
  return scale * (a * a.transpose() / static_cast<double>(r) + 0.5 * Matrix::Identity(r, r));
}

/// A model state with arbitrary means, SPD row covariances and posteriors;
/// the data scale is left at one.
inline ModelState random_state(const Shape& shape, std::size_t rank, double observed_fraction,
                               std::mt19937_64& rng, double cov_scale = 0.1) {
  PriorConfig cfg;
  cfg.init_rank = rank;
  cfg.init_strategy = InitStrategy::kRandom;
  cfg.working_power = 0.0;
  cfg.seed = rng();
  const DenseTensor y = random_tensor(shape, rng);
  ModelState s = init_model(y, random_mask(shape, observed_fraction, rng), cfg);
  const auto r = static_cast<Eigen::Index>(rank);
  std::gamma_distribution<double> pos(2.0, 1.0);
  for (auto& f : s.factors) {
    f.mean = random_matrix(f.mean.rows(), r, rng);
    for (auto& v : f.row_cov) v = random_spd(r, cov_scale, rng);
    f.refresh_quad();
  }
  for (Eigen::Index k = 0; k < r; ++k) {
    s.lambda.shape(k) = pos(rng);
    s.lambda.rate(k) = pos(rng);
  }
  s.tau.shape = pos(rng) + 1.0;
  s.tau.rate = pos(rng);
  return s;
}

}  // namespace fbcp::test
