#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbcp/model.hpp"
#include "fbcp/synthetic.hpp"

namespace fbcp {

struct MetricsReport {
  double rse_all = 0.0;
  std::optional<double> rse_missing;   // absent when nothing is missing
  std::optional<double> rse_observed;  // absent when nothing is observed
  std::optional<double> psnr;
  std::size_t inferred_rank = 0;
  std::optional<bool> rank_correct;
};

/// RSE overall and split by the observation mask; PSNR when a peak is given,
/// rank correctness when the true rank is known.
MetricsReport evaluate(const DenseTensor& estimate, const DenseTensor& truth,
                       const ObservationMask& mask, std::size_t inferred_rank,
                       std::optional<std::size_t> true_rank = std::nullopt,
                       std::optional<double> peak = std::nullopt);

struct SweepCondition {
  Shape shape;
  std::size_t rank = 1;
  NoiseSpec noise;
  double missing_ratio = 0.0;
  /// One instance seed per repetition; empty means seed_base + k.
  std::vector<std::uint64_t> seeds;
};

struct SweepRow {
  SweepCondition condition;
  std::vector<std::size_t> ranks;  // successful runs only
  std::size_t failures = 0;
  double mean_rank = 0.0;
  double std_rank = 0.0;
  double detection_fraction = 0.0;  // exact detections over all repetitions
  double mean_rse = 0.0;            // over missing entries, or all entries when complete
  double mean_wall_ms = 0.0;
};

/// Runs fit on `reps` synthetic instances per condition. Failed fits are
/// counted, not rethrown. Throws InvalidArgument on repeated seeds.
std::vector<SweepRow> rank_detection_sweep(const std::vector<SweepCondition>& grid,
                                           std::size_t reps, const PriorConfig& cfg,
                                           std::uint64_t seed_base);

}  // namespace fbcp
