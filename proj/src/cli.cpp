#include "fbcp/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbcp/errors.hpp"
#include "fbcp/evaluation.hpp"
#include "fbcp/image_io.hpp"
#include "fbcp/inference.hpp"
#include "fbcp/metrics.hpp"
#include "fbcp/mixture.hpp"
#include "fbcp/predictive.hpp"
#include "fbcp/report.hpp"
#include "fbcp/synthetic.hpp"
#include "fbcp/tensor_io.hpp"

namespace fbcp::cli {

namespace {

using nlohmann::json;

struct FitFlags {
  std::optional<std::size_t> init_rank;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
  std::string init = "svd";
  bool mp = false;
  std::string smooth_modes;
  std::uint64_t seed = 0;
};

struct CompleteArgs {
  std::string input, mask, truth, out_prefix;
  FitFlags fit;
};

struct SynthArgs {
  std::string shape, out_prefix;
  std::size_t rank = 0;
  std::optional<double> snr_db, noise_var;
  double missing = 0.0;
  std::uint64_t seed = 0;
};

struct BenchArgs {
  std::string grid, out;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
};

struct InpaintArgs {
  std::string image, mask_image, out, report, truth;
  int missing_above = 200;
  FitFlags fit;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--init-rank", f.init_rank, "initial number of components");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap");
  cmd->add_option("--tol", f.tol, "relative lower-bound change that stops the loop");
  cmd->add_option("--init", f.init, "factor initialization")
      ->check(CLI::IsMember({"svd", "random"}));
  cmd->add_flag("--mp", f.mp, "smooth factor means with neighbourhood mixtures");
  cmd->add_option("--smooth-modes", f.smooth_modes, "1-based modes to smooth, e.g. 1,2");
  cmd->add_option("--seed", f.seed, "random seed");
}

PriorConfig prior_config(const FitFlags& f, std::size_t default_rank) {
  PriorConfig cfg;
  cfg.init_rank = f.init_rank.value_or(default_rank);
  if (f.max_iters) cfg.max_iters = *f.max_iters;
  if (f.tol) cfg.tol = *f.tol;
  cfg.init_strategy = f.init == "random" ? InitStrategy::kRandom : InitStrategy::kSvd;
  cfg.seed = f.seed;
  cfg.validate();
  return cfg;
}

std::vector<std::size_t> smooth_modes(const FitFlags& f, std::size_t order) {
  std::vector<std::size_t> modes;
  if (f.smooth_modes.empty()) {
    for (std::size_t m = 0; m < std::min<std::size_t>(2, order); ++m) modes.push_back(m);
    return modes;
  }
  std::stringstream ss(f.smooth_modes);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long m = 0;
    try {
      m = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size() || m < 1 || m > order) {
      throw InvalidArgument("bad smoothing mode '" + item + "' for an order-" +
                            std::to_string(order) + " tensor");
    }
    modes.push_back(m - 1);
  }
  return modes;
}

FitResult run_fit_flags(const DenseTensor& y, const ObservationMask& mask, const FitFlags& f,
                        const PriorConfig& cfg) {
  if (f.mp) return fit_mp(y, mask, cfg, smooth_modes(f, y.order()));
  if (!f.smooth_modes.empty()) throw InvalidArgument("--smooth-modes requires --mp");
  return fit(y, mask, cfg);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw FormatError("failed writing " + path);
}

int cmd_complete(const CompleteArgs& a, std::ostream& out) {
  const DenseTensor y = load_tensor(a.input);
  const ObservationMask mask = load_mask(a.mask);
  if (y.shape() != mask.shape()) {
    throw ShapeError("tensor shape " + y.shape().to_string() + " does not match mask shape " +
                     mask.shape().to_string());
  }
  std::optional<DenseTensor> truth;
  if (!a.truth.empty()) {
    truth = load_tensor(a.truth);
    if (truth->shape() != y.shape()) {
      throw ShapeError("truth shape " + truth->shape().to_string() + " does not match " +
                       y.shape().to_string());
    }
  }
  const PriorConfig cfg = prior_config(a.fit, PriorConfig{}.init_rank);
  const FitResult res = run_fit_flags(y, mask, a.fit, cfg);
  const MissingPrediction pred = predict_missing(res.state, mask);

  save_tensor(a.out_prefix + ".completed.btf", pred.mean);
  save_tensor(a.out_prefix + ".variance.btf", pred.variance);
  write_json(a.out_prefix + ".report.json", to_json(res.report));
  if (truth) {
    write_json(a.out_prefix + ".metrics.json",
               to_json(evaluate(pred.mean, *truth, mask, res.report.inferred_rank)));
  }
  out << "rank " << res.report.inferred_rank << " after " << res.report.iterations
      << " iterations\n";
  return kOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const Shape shape = parse_shape(a.shape);
  const NoiseSpec noise = a.snr_db ? NoiseSpec::snr_db(*a.snr_db) : NoiseSpec::variance(*a.noise_var);
  const SyntheticInstance inst = generate_synthetic(shape, a.rank, noise, a.missing, a.seed);

  save_tensor(a.out_prefix + ".y.btf", inst.observed);
  save_mask(a.out_prefix + ".mask.btm", inst.mask);
  save_tensor(a.out_prefix + ".x.btf", inst.truth);
  for (std::size_t n = 0; n < inst.factors.size(); ++n) {
    const FactorMatrix& f = inst.factors[n];
    DenseTensor t(Shape{static_cast<std::size_t>(f.rows()), static_cast<std::size_t>(f.cols())},
                  std::vector<double>(f.data(), f.data() + f.size()));
    save_tensor(a.out_prefix + ".factor" + std::to_string(n + 1) + ".btf", t);
  }
  json prov{{"v", kReportVersion},
            {"shape", shape.dims()},
            {"rank", inst.true_rank},
            {"seed", inst.seed},
            {"noise_variance", inst.noise_variance},
            {"missing_ratio", inst.missing_ratio}};
  prov["snr_db"] = std::isinf(inst.snr_db) ? json("inf") : json(inst.snr_db);
  write_json(a.out_prefix + ".provenance.json", prov);
  out << "wrote " << shape.to_string() << " instance, noise variance " << inst.noise_variance
      << '\n';
  return kOk;
}

SweepCondition parse_condition(const json& c, std::size_t reps) {
  SweepCondition cond;
  if (!c.is_object()) throw FormatError("grid condition must be an object");
  const json& shape = c.at("shape");
  if (shape.is_string()) {
    cond.shape = parse_shape(shape.get<std::string>());
  } else {
    cond.shape = Shape(shape.get<std::vector<std::size_t>>());
  }
  cond.rank = c.at("rank").get<std::size_t>();
  cond.missing_ratio = c.value("missing", 0.0);
  if (cond.rank < 1) throw FormatError("condition rank must be at least 1");
  if (!(cond.missing_ratio >= 0.0 && cond.missing_ratio < 1.0)) {
    throw FormatError("condition missing ratio must lie in [0, 1)");
  }
  const bool has_snr = c.contains("snr_db");
  const bool has_var = c.contains("noise_var");
  if (has_snr && has_var) throw FormatError("condition gives both snr_db and noise_var");
  if (has_snr) {
    cond.noise = NoiseSpec::snr_db(c["snr_db"].get<double>());
  } else if (has_var) {
    cond.noise = NoiseSpec::variance(c["noise_var"].get<double>());
  }
  if (c.contains("seeds")) {
    cond.seeds = c["seeds"].get<std::vector<std::uint64_t>>();
    if (cond.seeds.size() != reps) {
      throw FormatError("condition lists " + std::to_string(cond.seeds.size()) +
                        " seeds but --reps is " + std::to_string(reps));
    }
    if (std::set<std::uint64_t>(cond.seeds.begin(), cond.seeds.end()).size() != reps) {
      throw FormatError("duplicate seeds in grid condition");
    }
  }
  return cond;
}

int cmd_bench_rank(const BenchArgs& a, std::ostream& out) {
  std::ifstream is(a.grid);
  if (!is) throw FormatError("cannot open grid " + a.grid);
  std::vector<SweepCondition> grid;
  PriorConfig cfg;
  try {
    const json spec = json::parse(is);
    const json& conditions = spec.is_array() ? spec : spec.at("conditions");
    if (!conditions.is_array() || conditions.empty()) {
      throw FormatError("grid must list at least one condition");
    }
    for (const json& c : conditions) grid.push_back(parse_condition(c, a.reps));
    if (spec.is_object()) {
      cfg.init_rank = spec.value("init_rank", cfg.init_rank);
      cfg.max_iters = spec.value("max_iters", cfg.max_iters);
      cfg.tol = spec.value("tol", cfg.tol);
    }
  } catch (const json::exception& e) {
    throw FormatError("malformed grid " + a.grid + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError("malformed grid " + a.grid + ": " + e.what());
  } catch (const ShapeError& e) {
    throw FormatError("malformed grid " + a.grid + ": " + e.what());
  }
  const std::vector<SweepRow> rows = rank_detection_sweep(grid, a.reps, cfg, a.seed);
  write_json(a.out, to_json(rows));
  const std::string table = format_table(rows);
  std::ofstream txt(a.out + ".txt");
  if (!txt) throw FormatError("cannot open " + a.out + ".txt for writing");
  txt << table;
  out << table;
  return kOk;
}

ObservationMask image_mask(const RgbImage& img, const InpaintArgs& a) {
  std::vector<std::uint8_t> flags(img.width * img.height * 3, 1);
  const auto mark = [&](std::size_t row, std::size_t col) {
    for (std::size_t c = 0; c < 3; ++c) flags[row + img.height * (col + img.width * c)] = 0;
  };
  if (!a.mask_image.empty()) {
    const RgbImage m = read_png(a.mask_image);
    if (m.width != img.width || m.height != img.height) {
      throw ShapeError("mask image is " + std::to_string(m.width) + "x" + std::to_string(m.height) +
                       ", image is " + std::to_string(img.width) + "x" + std::to_string(img.height));
    }
    for (std::size_t row = 0; row < img.height; ++row)
      for (std::size_t col = 0; col < img.width; ++col)
        if (std::max({m.at(row, col, 0), m.at(row, col, 1), m.at(row, col, 2)}) >= 128) mark(row, col);
  } else {
    for (std::size_t row = 0; row < img.height; ++row)
      for (std::size_t col = 0; col < img.width; ++col)
        if (std::max({img.at(row, col, 0), img.at(row, col, 1), img.at(row, col, 2)}) > a.missing_above)
          mark(row, col);
  }
  return ObservationMask(Shape{img.height, img.width, 3}, std::move(flags));
}

int cmd_inpaint(const InpaintArgs& a, std::ostream& out) {
  const RgbImage img = read_png(a.image);
  const DenseTensor y = image_to_tensor(img);
  const ObservationMask mask = image_mask(img, a);
  if (mask.count() == 0) throw InvalidArgument("every pixel is marked missing");
  const double missing = 1.0 - static_cast<double>(mask.count()) / static_cast<double>(y.numel());

  DenseTensor completed = y;
  json report;
  if (a.fit.max_iters && *a.fit.max_iters == 0) {
    for (std::size_t p = 0; p < y.numel(); ++p)
      if (!mask.observed(p)) completed[p] = 0.0;
    report = {{"v", kReportVersion}, {"iterations", 0}};
  } else {
    const PriorConfig cfg = prior_config(a.fit, missing >= 0.9 ? 50 : 100);
    const FitResult res = run_fit_flags(y, mask, a.fit, cfg);
    completed = reconstruct(res.state);
    report = to_json(res.report);
  }
  report["missing_ratio"] = missing;
  if (!a.truth.empty()) {
    const DenseTensor truth = image_to_tensor(read_png(a.truth));
    if (truth.shape() != y.shape()) throw ShapeError("truth image size differs from input");
    DenseTensor clamped = completed;
    for (double& v : clamped.values()) v = std::clamp(v, 0.0, 1.0);
    report["metrics"] = to_json(evaluate(clamped, truth, mask, report.value("inferred_rank", std::size_t{0}),
                                         std::nullopt, 1.0));
  }
  write_png(a.out, tensor_to_image(completed));
  if (!a.report.empty()) write_json(a.report, report);
  out << "inpainted " << img.width << "x" << img.height << " image, " << missing * 100.0
      << "% missing\n";
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian CP tensor completion with automatic rank determination"};
  app.require_subcommand(1);

  CompleteArgs complete;
  CLI::App* c = app.add_subcommand("complete", "complete a BTF1 tensor under a BTM1 mask");
  c->add_option("--input", complete.input, "observed tensor (BTF1)")->required();
  c->add_option("--mask", complete.mask, "observation mask (BTM1)")->required();
  c->add_option("--truth", complete.truth, "ground truth tensor (BTF1) for metrics");
  c->add_option("--out-prefix", complete.out_prefix, "output path prefix")->required();
  add_fit_flags(c, complete.fit);

  SynthArgs synth;
  CLI::App* s = app.add_subcommand("synth", "generate a synthetic low-rank instance");
  s->add_option("--shape", synth.shape, "extents as I1xI2x...xIN")->required();
  s->add_option("--rank", synth.rank, "true CP rank")->required();
  auto* snr = s->add_option("--snr-db", synth.snr_db, "signal-to-noise ratio in dB");
  auto* var = s->add_option("--noise-var", synth.noise_var, "absolute noise variance");
  snr->excludes(var);
  var->excludes(snr);
  s->add_option("--missing", synth.missing, "fraction of missing entries")->required();
  s->add_option("--seed", synth.seed, "random seed")->required();
  s->add_option("--out-prefix", synth.out_prefix, "output path prefix")->required();

  BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench-rank", "rank detection over a grid of conditions");
  b->add_option("--grid", bench.grid, "grid specification (JSON)")->required();
  b->add_option("--reps", bench.reps, "repetitions per condition")->required()->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed, "seed of the first repetition")->required();
  b->add_option("--out", bench.out, "summary JSON; a text table goes next to it")->required();

  InpaintArgs inpaint;
  CLI::App* p = app.add_subcommand("inpaint", "complete the missing pixels of a PNG image");
  p->add_option("--image", inpaint.image, "input PNG")->required();
  p->add_option("--mask-image", inpaint.mask_image, "PNG whose bright pixels mark missing ones");
  p->add_option("--missing-above", inpaint.missing_above,
                "pixels with any channel above this value are missing")
      ->check(CLI::Range(0, 255));
  p->add_option("--out", inpaint.out, "output PNG")->required();
  p->add_option("--report", inpaint.report, "fit report JSON");
  p->add_option("--truth", inpaint.truth, "clean PNG for metrics");
  add_fit_flags(p, inpaint.fit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadFlags;
  }

  try {
    if (*s && !synth.snr_db && !synth.noise_var) {
      throw InvalidArgument("synth needs --snr-db or --noise-var");
    }
    if (*c) return cmd_complete(complete, out);
    if (*s) return cmd_synth(synth, out);
    if (*b) return cmd_bench_rank(bench, out);
    return cmd_inpaint(inpaint, out);
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kFormatError;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << '\n';
    return kShapeError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kBadFlags;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace fbcp::cli
