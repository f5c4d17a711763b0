#include "fbcp/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "fbcp/errors.hpp"

namespace fbcp {

namespace {

FactorMatrix svd_init(const DenseTensor& zero_filled, std::size_t mode, std::size_t rank,
                      std::mt19937_64& rng) {
  const Matrix unfolded = unfold(zero_filled, mode);
  const Eigen::Index rows = unfolded.rows();
  // Left singular vectors and values from the eigenpairs of X X^T.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(unfolded * unfolded.transpose());
  const Eigen::Index available = std::min<Eigen::Index>(rows, unfolded.cols());
  FactorMatrix out(rows, static_cast<Eigen::Index>(rank));
  std::normal_distribution<double> pad(0.0, 0.1);
  for (Eigen::Index r = 0; r < out.cols(); ++r) {
    if (r < available) {
      const Eigen::Index src = rows - 1 - r;  // eigenvalues ascend
      const double sigma = std::sqrt(std::max(eig.eigenvalues()(src), 0.0));
      out.col(r) = eig.eigenvectors().col(src) * std::sqrt(sigma);
    } else {
      for (Eigen::Index i = 0; i < rows; ++i) out(i, r) = pad(rng);
    }
  }
  return out;
}

// P is overwritten by its inverse. Jitter escalates 1e-10, 1e-9, 1e-8 times trace/R.
void invert_spd(Matrix& p, std::size_t mode, std::size_t row) {
  const Eigen::Index r = p.rows();
  Eigen::LLT<Matrix> llt(p);
  double jitter = 1e-10 * p.trace() / static_cast<double>(r);
  for (int attempt = 0; llt.info() != Eigen::Success; ++attempt) {
    if (attempt == 3 || !std::isfinite(jitter)) {
      throw NumericError("posterior precision of mode " + std::to_string(mode + 1) + " row " +
                         std::to_string(row + 1) + " is not positive definite");
    }
    Matrix jittered = p;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    jitter *= 10.0;
  }
  p = llt.solve(Matrix::Identity(r, r));
  p = 0.5 * (p + p.transpose()).eval();
}

double gamma_entropy(double shape, double rate) {
  return std::lgamma(shape) - (shape - 1.0) * boost::math::digamma(shape) - std::log(rate) + shape;
}

double gamma_log_normalizer(double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape);
}

double sum_extents(const ModelState& state) {
  double s = 0.0;
  for (const auto& f : state.factors) s += static_cast<double>(f.rows());
  return s;
}

}  // namespace

ModelState init_model(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg) {
  cfg.validate();
  if (mask.count() == 0) throw InvalidArgument("mask has no observed entries");
  if (y.shape() != mask.shape()) {
    throw ShapeError("tensor shape " + y.shape().to_string() + " does not match mask shape " +
                     mask.shape().to_string());
  }
  double scale = 1.0;
  if (cfg.working_power > 0) {
    const auto count = static_cast<double>(mask.count());
    double mean = 0.0;
    for (std::size_t p : mask.positions()) mean += y[p];
    mean /= count;
    double spread = 0.0;
    for (std::size_t p : mask.positions()) spread += (y[p] - mean) * (y[p] - mean);
    spread /= count;
    if (spread > 0 && std::isfinite(spread)) scale = std::sqrt(cfg.working_power / spread);
  }
  auto data = std::make_shared<const ObservedData>(y, mask, scale);

  ModelState state;
  state.config = cfg;
  state.data = data;
  const std::size_t order = y.order();
  const auto rank = static_cast<Eigen::Index>(cfg.init_rank);
  std::mt19937_64 rng(cfg.seed);

  DenseTensor zero_filled(y.shape());
  if (cfg.init_strategy == InitStrategy::kSvd) {
    for (std::size_t k = 0; k < mask.count(); ++k) zero_filled[mask.positions()[k]] = data->values[k];
  }

  state.factors.resize(order);
  std::normal_distribution<double> standard(0.0, 1.0);
  for (std::size_t n = 0; n < order; ++n) {
    FactorPosterior& f = state.factors[n];
    const auto rows = static_cast<Eigen::Index>(y.shape()[n]);
    if (cfg.init_strategy == InitStrategy::kSvd) {
      f.mean = svd_init(zero_filled, n, cfg.init_rank, rng);
    } else {
      f.mean.resize(rows, rank);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index r = 0; r < rank; ++r) f.mean(i, r) = standard(rng);
    }
    f.row_cov.assign(static_cast<std::size_t>(rows), Matrix::Identity(rank, rank));
    f.refresh_quad();
  }
  state.lambda.shape = Vector::Constant(rank, cfg.c0);
  state.lambda.rate = Vector::Constant(rank, cfg.d0);
  state.tau.shape = cfg.a0;
  state.tau.rate = cfg.b0;
  return state;
}

Matrix expected_kr_gram(const ModelState& state, std::size_t mode, std::size_t row) {
  const ObservationMask& mask = state.data->mask;
  if (mode >= state.order() || row >= state.shape()[mode]) {
    throw InvalidArgument("slice index out of range");
  }
  const auto r = static_cast<Eigen::Index>(state.rank());
  const Eigen::Index r2 = r * r;
  Vector acc = Vector::Zero(r2);
  Vector h(r2);
  for (std::uint32_t k : mask.slice(mode, row)) {
    const auto idx = mask.observed_index(k);
    h.setOnes();
    for (std::size_t m = 0; m < state.order(); ++m) {
      if (m == mode) continue;
      h.array() *= state.factors[m].quad.row(idx[m]).transpose().array();
    }
    acc += h;
  }
  return Eigen::Map<Matrix>(acc.data(), r, r);
}

void update_factor(ModelState& state, std::size_t mode) {
  if (mode >= state.order()) throw InvalidArgument("mode out of range");
  const ObservedData& data = *state.data;
  const ObservationMask& mask = data.mask;
  const std::size_t order = state.order();
  const auto r = static_cast<Eigen::Index>(state.rank());
  const Eigen::Index r2 = r * r;
  const double e_tau = state.tau.expectation();
  const Vector e_lambda = state.lambda.expectation();

  FactorPosterior& target = state.factors[mode];
  Vector gram(r2), h2(r2), rhs(r), h1(r);
  Matrix precision(r, r);
  for (std::size_t i = 0; i < target.rows(); ++i) {
    gram.setZero();
    rhs.setZero();
    for (std::uint32_t k : mask.slice(mode, i)) {
      const auto idx = mask.observed_index(k);
      h2.setOnes();
      h1.setOnes();
      for (std::size_t m = 0; m < order; ++m) {
        if (m == mode) continue;
        h2.array() *= state.factors[m].quad.row(idx[m]).transpose().array();
        h1.array() *= state.factors[m].mean.row(idx[m]).transpose().array();
      }
      gram += h2;
      rhs += data.values[k] * h1;
    }
    precision = e_tau * Eigen::Map<Matrix>(gram.data(), r, r);
    precision = 0.5 * (precision + precision.transpose()).eval();
    precision.diagonal() += e_lambda;
    invert_spd(precision, mode, i);
    target.row_cov[i] = precision;
    target.mean.row(static_cast<Eigen::Index>(i)) = (e_tau * (precision * rhs)).transpose();
  }
  target.refresh_quad();
}

void update_lambda(ModelState& state) {
  const PriorConfig& cfg = state.config;
  const auto r = static_cast<Eigen::Index>(state.rank());
  Vector norms = Vector::Zero(r);
  for (const auto& f : state.factors) {
    norms += f.mean.colwise().squaredNorm().transpose();
    for (const auto& v : f.row_cov) norms += v.diagonal();
  }
  state.lambda.shape = Vector::Constant(r, cfg.c0 + 0.5 * sum_extents(state));
  state.lambda.rate = (cfg.d0 + 0.5 * norms.array()).matrix();
}

double expected_model_error(const ModelState& state) {
  const ObservedData& data = *state.data;
  const ObservationMask& mask = data.mask;
  const std::size_t order = state.order();
  const auto r = static_cast<Eigen::Index>(state.rank());
  const Eigen::Index r2 = r * r;
  // Per entry: (y - E[x])^2 + (E[x^2] - E[x]^2); the bracket is the variance
  // <E[a a^T]...> - <m...>^2, which keeps cancellation local to each entry.
  Vector h2(r2), h1(r);
  double total = 0.0;
  for (std::size_t k = 0; k < mask.count(); ++k) {
    const auto idx = mask.observed_index(k);
    h2 = state.factors[0].quad.row(idx[0]).transpose();
    h1 = state.factors[0].mean.row(idx[0]).transpose();
    for (std::size_t m = 1; m < order; ++m) {
      h2.array() *= state.factors[m].quad.row(idx[m]).transpose().array();
      h1.array() *= state.factors[m].mean.row(idx[m]).transpose().array();
    }
    const double mean = h1.sum();
    const double resid = data.values[k] - mean;
    total += resid * resid + (h2.sum() - mean * mean);
  }
  if (total < -1e-9) throw NumericError("expected model error is negative");
  return std::max(total, 0.0);
}

void update_tau(ModelState& state) {
  const PriorConfig& cfg = state.config;
  state.tau.shape = cfg.a0 + 0.5 * static_cast<double>(state.data->mask.count());
  state.tau.rate = cfg.b0 + 0.5 * expected_model_error(state);
}

double lower_bound(const ModelState& state) {
  using boost::math::digamma;
  const PriorConfig& cfg = state.config;
  const double m = static_cast<double>(state.data->mask.count());
  const double s = sum_extents(state);
  const double ln2pi = std::log(2.0 * std::numbers::pi);

  const double e_tau = state.tau.expectation();
  const double e_ln_tau = digamma(state.tau.shape) - std::log(state.tau.rate);

  // Likelihood
  double bound = 0.5 * m * (e_ln_tau - ln2pi) - 0.5 * e_tau * expected_model_error(state);

  // Factor priors and entropies; the ln(2 pi) terms of both cancel.
  const auto r = static_cast<Eigen::Index>(state.rank());
  Vector norms = Vector::Zero(r);
  double log_dets = 0.0;
  for (std::size_t n = 0; n < state.order(); ++n) {
    const FactorPosterior& f = state.factors[n];
    norms += f.mean.colwise().squaredNorm().transpose();
    for (std::size_t i = 0; i < f.rows(); ++i) {
      norms += f.row_cov[i].diagonal();
      Eigen::LLT<Matrix> llt(f.row_cov[i]);
      if (llt.info() != Eigen::Success) {
        throw NumericError("row covariance of mode " + std::to_string(n + 1) + " row " +
                           std::to_string(i + 1) + " is not positive definite");
      }
      log_dets += 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
  }
  bound += 0.5 * log_dets + 0.5 * s * static_cast<double>(r);
  for (Eigen::Index q = 0; q < r; ++q) {
    const double c = state.lambda.shape(q);
    const double d = state.lambda.rate(q);
    const double e_lambda = c / d;
    const double e_ln_lambda = digamma(c) - std::log(d);
    bound += 0.5 * s * e_ln_lambda - 0.5 * e_lambda * norms(q);
    bound += gamma_log_normalizer(cfg.c0, cfg.d0) + (cfg.c0 - 1.0) * e_ln_lambda - cfg.d0 * e_lambda;
    bound += gamma_entropy(c, d);
  }

  bound += gamma_log_normalizer(cfg.a0, cfg.b0) + (cfg.a0 - 1.0) * e_ln_tau - cfg.b0 * e_tau;
  bound += gamma_entropy(state.tau.shape, state.tau.rate);
  return bound;
}

Vector component_power(const ModelState& state) {
  Vector power = Vector::Zero(static_cast<Eigen::Index>(state.rank()));
  for (const auto& f : state.factors) power += f.mean.colwise().squaredNorm().transpose();
  return power / sum_extents(state);
}

namespace {

// ||[[A]]||_F^2 = 1^T (hadamard_n A_n^T A_n) 1
double kruskal_sq_norm(const ModelState& state, const std::vector<Eigen::Index>& cols) {
  const auto k = static_cast<Eigen::Index>(cols.size());
  if (k == 0) return 0.0;
  Matrix acc = Matrix::Ones(k, k);
  for (const auto& f : state.factors) {
    Matrix sub(f.mean.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) sub.col(j) = f.mean.col(cols[static_cast<std::size_t>(j)]);
    acc.array() *= (sub.transpose() * sub).array();
  }
  return std::max(acc.sum(), 0.0);
}

}  // namespace

std::size_t prune(ModelState& state) {
  const Vector power = component_power(state);
  const auto r = power.size();
  if (r <= 1) return 0;
  Eigen::Index strongest = 0;
  const double max_power = power.maxCoeff(&strongest);
  std::vector<Eigen::Index> keep, drop;
  for (Eigen::Index q = 0; q < r; ++q) {
    if (q != strongest && power(q) <= state.config.prune_tol * max_power) {
      drop.push_back(q);
    } else {
      keep.push_back(q);
    }
  }
  if (drop.empty()) return 0;

  // Only prune when the reconstruction moves by at most 1e-6 relative.
  std::vector<Eigen::Index> all(static_cast<std::size_t>(r));
  for (Eigen::Index q = 0; q < r; ++q) all[static_cast<std::size_t>(q)] = q;
  const double total = kruskal_sq_norm(state, all);
  if (std::sqrt(kruskal_sq_norm(state, drop)) > 1e-6 * std::sqrt(total)) return 0;

  const auto k = static_cast<Eigen::Index>(keep.size());
  for (auto& f : state.factors) {
    FactorMatrix mean(f.mean.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) mean.col(j) = f.mean.col(keep[static_cast<std::size_t>(j)]);
    f.mean = std::move(mean);
    for (auto& v : f.row_cov) {
      Matrix reduced(k, k);
      for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
          reduced(a, b) = v(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
      v = std::move(reduced);
    }
    f.refresh_quad();
  }
  Vector shape(k), rate(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    shape(j) = state.lambda.shape(keep[static_cast<std::size_t>(j)]);
    rate(j) = state.lambda.rate(keep[static_cast<std::size_t>(j)]);
  }
  state.lambda.shape = std::move(shape);
  state.lambda.rate = std::move(rate);
  return drop.size();
}

namespace {

std::size_t count_active(const ModelState& state) {
  const Vector power = component_power(state);
  if (power.size() == 0) return 0;
  const double max_power = power.maxCoeff();
  if (max_power <= 0.0) return 0;
  return static_cast<std::size_t>((power.array() > state.config.prune_tol * max_power).count());
}

}  // namespace

FitReport run_fit(ModelState& state, const ModeHook& after_factor_update) {
  const auto start = std::chrono::steady_clock::now();
  const PriorConfig& cfg = state.config;
  FitReport report;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    try {
      for (std::size_t n = 0; n < state.order(); ++n) {
        update_factor(state, n);
        if (after_factor_update) after_factor_update(state, n);
      }
      update_lambda(state);
      update_tau(state);
      const double bound = lower_bound(state);
      if (!std::isfinite(bound)) throw NumericError("lower bound is not finite");
      report.elbo_trace.push_back(bound);
      report.iterations = it;

      bool converged = false;
      if (report.elbo_trace.size() > 1) {
        const double prev = report.elbo_trace[report.elbo_trace.size() - 2];
        converged = std::abs(bound - prev) < cfg.tol * std::abs(bound);
      }
      std::size_t removed = 0;
      if (cfg.prune_enabled && it > 2) removed = prune(state);
      report.rank_trace.push_back(state.rank());
      if (converged && removed == 0) {
        report.converged = true;
        break;
      }
    } catch (const NumericError& e) {
      throw NumericError("iteration " + std::to_string(it) + ": " + e.what());
    }
  }
  report.inferred_rank = count_active(state);
  report.e_tau = state.tau.expectation() * state.data->scale * state.data->scale;
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

FitResult fit(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg,
              const ModeHook& after_factor_update) {
  FitResult result{init_model(y, mask, cfg), {}};
  result.report = run_fit(result.state, after_factor_update);
  return result;
}

FitResult fit(const DenseTensor& y, const ObservationMask& mask, const PriorConfig& cfg) {
  return fit(y, mask, cfg, ModeHook{});
}

DenseTensor reconstruct(const ModelState& state) {
  const auto means = state.means();
  DenseTensor out = kruskal(means);
  if (state.data->scale != 1.0) {
    for (double& v : out.values()) v /= state.data->scale;
  }
  return out;
}

}  // namespace fbcp
