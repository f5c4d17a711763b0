#include "fbcp/report.hpp"

#include <cmath>
#include <cstdio>

namespace fbcp {

nlohmann::json to_json(const FitReport& report) {
  return {
      {"v", kReportVersion},
      {"inferred_rank", report.inferred_rank},
      {"iterations", report.iterations},
      {"converged", report.converged},
      {"e_tau", report.e_tau},
      {"elbo_trace", report.elbo_trace},
      {"rank_trace", report.rank_trace},
      {"wall_ms", report.wall_ms},
  };
}

nlohmann::json to_json(const MetricsReport& metrics) {
  nlohmann::json j{{"v", kReportVersion},
                   {"rse_all", metrics.rse_all},
                   {"inferred_rank", metrics.inferred_rank}};
  if (metrics.rse_missing) j["rse_missing"] = *metrics.rse_missing;
  if (metrics.rse_observed) j["rse_observed"] = *metrics.rse_observed;
  if (metrics.psnr) j["psnr"] = std::isinf(*metrics.psnr) ? nlohmann::json("inf") : nlohmann::json(*metrics.psnr);
  if (metrics.rank_correct) j["rank_correct"] = *metrics.rank_correct;
  return j;
}

std::string describe_noise(const NoiseSpec& noise) {
  char buf[64];
  if (noise.kind == NoiseSpec::Kind::kVariance) {
    std::snprintf(buf, sizeof buf, "var=%g", noise.value);
  } else if (std::isinf(noise.value)) {
    std::snprintf(buf, sizeof buf, "none");
  } else {
    std::snprintf(buf, sizeof buf, "%gdB", noise.value);
  }
  return buf;
}

nlohmann::json to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json list = nlohmann::json::array();
  for (const SweepRow& row : rows) {
    const SweepCondition& c = row.condition;
    nlohmann::json cond{{"shape", c.shape.dims()}, {"rank", c.rank}, {"missing", c.missing_ratio}};
    if (c.noise.kind == NoiseSpec::Kind::kVariance) {
      cond["noise_var"] = c.noise.value;
    } else if (!std::isinf(c.noise.value)) {
      cond["snr_db"] = c.noise.value;
    }
    list.push_back({{"condition", cond},
                    {"ranks", row.ranks},
                    {"failures", row.failures},
                    {"mean_rank", row.mean_rank},
                    {"std_rank", row.std_rank},
                    {"detection_fraction", row.detection_fraction},
                    {"mean_rse", row.mean_rse},
                    {"mean_wall_ms", row.mean_wall_ms}});
  }
  return {{"v", kReportVersion}, {"rows", list}};
}

std::string format_table(const std::vector<SweepRow>& rows) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %4s %10s %7s %5s %9s %8s %7s %9s %10s\n", "shape", "R",
                "noise", "missing", "reps", "mean_rank", "std_rank", "detect", "rse", "time_ms");
  out += line;
  for (const SweepRow& row : rows) {
    const SweepCondition& c = row.condition;
    std::snprintf(line, sizeof line, "%-16s %4zu %10s %7.2f %5zu %9.2f %8.2f %7.2f %9.4f %10.1f\n",
                  c.shape.to_string().c_str(), c.rank, describe_noise(c.noise).c_str(),
                  c.missing_ratio, row.ranks.size() + row.failures, row.mean_rank, row.std_rank,
                  row.detection_fraction, row.mean_rse, row.mean_wall_ms);
    out += line;
  }
  return out;
}

}  // namespace fbcp
