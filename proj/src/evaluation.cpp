#include "fbcp/evaluation.hpp"

#include <cmath>
#include <set>

#include "fbcp/errors.hpp"
#include "fbcp/inference.hpp"
#include "fbcp/metrics.hpp"

namespace fbcp {

MetricsReport evaluate(const DenseTensor& estimate, const DenseTensor& truth,
                       const ObservationMask& mask, std::size_t inferred_rank,
                       std::optional<std::size_t> true_rank, std::optional<double> peak) {
  MetricsReport out;
  out.rse_all = rse(estimate, truth);
  const ObservationMask missing = complement(mask);
  if (missing.count() > 0) out.rse_missing = rse(estimate, truth, missing);
  if (mask.count() > 0) out.rse_observed = rse(estimate, truth, mask);
  if (peak) out.psnr = psnr(estimate, truth, *peak);
  out.inferred_rank = inferred_rank;
  if (true_rank) out.rank_correct = inferred_rank == *true_rank;
  return out;
}

std::vector<SweepRow> rank_detection_sweep(const std::vector<SweepCondition>& grid,
                                           std::size_t reps, const PriorConfig& cfg,
                                           std::uint64_t seed_base) {
  if (reps < 1) throw InvalidArgument("reps must be at least 1");
  cfg.validate();
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const SweepCondition& cond : grid) {
    std::vector<std::uint64_t> seeds = cond.seeds;
    if (seeds.empty()) {
      for (std::size_t k = 0; k < reps; ++k) seeds.push_back(seed_base + k);
    }
    if (seeds.size() != reps) {
      throw InvalidArgument("condition lists " + std::to_string(seeds.size()) + " seeds for " +
                            std::to_string(reps) + " repetitions");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw InvalidArgument("repetition seeds must be distinct");
    }

    SweepRow row;
    row.condition = cond;
    std::size_t hits = 0;
    double rse_sum = 0.0;
    double ms_sum = 0.0;
    for (std::uint64_t seed : seeds) {
      const SyntheticInstance inst =
          generate_synthetic(cond.shape, cond.rank, cond.noise, cond.missing_ratio, seed);
      PriorConfig run_cfg = cfg;
      run_cfg.seed = seed;
      try {
        const FitResult fitted = fit(inst.observed, inst.mask, run_cfg);
        const DenseTensor est = reconstruct(fitted.state);
        const MetricsReport m = evaluate(est, inst.truth, inst.mask, fitted.report.inferred_rank);
        row.ranks.push_back(fitted.report.inferred_rank);
        hits += fitted.report.inferred_rank == cond.rank;
        rse_sum += m.rse_missing.value_or(m.rse_all);
        ms_sum += fitted.report.wall_ms;
      } catch (const NumericError&) {
        ++row.failures;
      }
    }
    const auto done = static_cast<double>(row.ranks.size());
    if (done > 0) {
      double sum = 0.0;
      for (std::size_t r : row.ranks) sum += static_cast<double>(r);
      row.mean_rank = sum / done;
      double ss = 0.0;
      for (std::size_t r : row.ranks) ss += (static_cast<double>(r) - row.mean_rank) * (static_cast<double>(r) - row.mean_rank);
      row.std_rank = done > 1 ? std::sqrt(ss / (done - 1)) : 0.0;
      row.mean_rse = rse_sum / done;
      row.mean_wall_ms = ms_sum / done;
    }
    row.detection_fraction = static_cast<double>(hits) / static_cast<double>(reps);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fbcp
