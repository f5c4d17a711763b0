#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fbcp/multilinear.hpp"
#include "fbcp/tensor.hpp"

namespace fbcp {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class InitStrategy { kSvd, kRandom };

inline constexpr std::size_t kMaxRank = 256;

struct PriorConfig {
  // Gamma(a0, b0) on the noise precision, Gamma(c0, d0) on every lambda_r.
  double a0 = 1e-6;
  double b0 = 1e-6;
  double c0 = 1e-6;
  double d0 = 1e-6;
  std::size_t init_rank = 10;
  InitStrategy init_strategy = InitStrategy::kSvd;
  std::size_t max_iters = 10000;
  /// Stop when |delta L| / |L| falls below this.
  double tol = 1e-6;
  bool prune_enabled = true;
  /// Relative component-power threshold.
  double prune_tol = 1e-4;
  std::uint64_t seed = 0;
  /// Observed values are rescaled to this variance before inference so the
  /// starting noise precision is commensurate with the data. 0 disables.
  double working_power = 20.0;

  /// Throws InvalidArgument.
  void validate() const;
};

/// Gaussian posterior over the rows of one factor matrix.
struct FactorPosterior {
  FactorMatrix mean;                 // I_n x R
  std::vector<Matrix> row_cov;       // I_n matrices, R x R
  RowMajorMatrix quad;               // I_n x R^2, row i = vec(m_i m_i^T + V_i)

  std::size_t rows() const { return static_cast<std::size_t>(mean.rows()); }
  std::size_t rank() const { return static_cast<std::size_t>(mean.cols()); }

  void refresh_quad();
  void refresh_quad_row(std::size_t i);
  /// E[m_i m_i^T + V_i] as an R x R map onto the cache.
  Eigen::Map<const Matrix> second_moment(std::size_t i) const {
    return {quad.data() + i * static_cast<std::size_t>(quad.cols()), mean.cols(), mean.cols()};
  }
};

struct LambdaPosterior {
  Vector shape;  // c_M
  Vector rate;   // d_M
  Vector expectation() const { return shape.cwiseQuotient(rate); }
};

struct TauPosterior {
  double shape = 1.0;  // a_M
  double rate = 1.0;   // b_M
  double expectation() const { return shape / rate; }
};

/// Observed data in working units (original times `scale`), with values
/// gathered in observation order.
struct ObservedData {
  DenseTensor y;
  ObservationMask mask;
  std::vector<double> values;
  double sq_norm = 0.0;
  double scale = 1.0;

  ObservedData(DenseTensor y, ObservationMask mask, double scale = 1.0);
};

struct ModelState {
  std::vector<FactorPosterior> factors;
  LambdaPosterior lambda;
  TauPosterior tau;
  PriorConfig config;
  std::shared_ptr<const ObservedData> data;

  std::size_t order() const { return factors.size(); }
  std::size_t rank() const { return factors.empty() ? 0 : factors[0].rank(); }
  const Shape& shape() const { return data->y.shape(); }
  std::vector<FactorMatrix> means() const;
};

struct FitReport {
  std::vector<double> elbo_trace;
  std::vector<std::size_t> rank_trace;
  std::size_t iterations = 0;
  std::size_t inferred_rank = 0;
  double e_tau = 0.0;  // noise precision in the units of the input data
  double wall_ms = 0.0;
  bool converged = false;
};

struct FitResult {
  ModelState state;
  FitReport report;
};

}  // namespace fbcp
