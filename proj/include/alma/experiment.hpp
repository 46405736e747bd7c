#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alma/alma.hpp"
#include "alma/lcurve.hpp"
#include "alma/metrics.hpp"

namespace alma {

struct LambdaSweepConfig {
  int points = 40;
  double decades_below = 2.0;
  double decades_above = 1.0;
  int golden_iters = 10;  // refinement evaluations around each grid optimum
};

struct LCurveConfig {
  int points = 25;
  double decades_below = 3.0;
  double decades_above = 1.0;
};

struct ExperimentConfig {
  int n = 384;
  int n_coils = 8;
  std::vector<double> ur_list{0.10, 0.15, 0.20};
  std::vector<double> nl_list{0.03, 0.05, 0.07};
  int runs = 50;
  std::uint64_t master_seed = 20240601;
  LambdaSweepConfig lambda_sweep;
  LCurveConfig lcurve;
  std::string output_dir = "out";
  SolverConfig solver;
  AlmaConfig alma;
  int threads = 1;
  bool images = true;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig experiment_config_from_file(const std::filesystem::path& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

struct SweepSample {
  double ratio = 0.0;   // lambda / lambda_alm
  double lambda = 0.0;
  double mssim = 0.0;
  double psnr_db = 0.0;
  double cjv = 0.0;
};

struct ExperimentRecord {
  double ur_pct = 0.0;
  double nl_pct = 0.0;
  int run_index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;

  int iterations = 0;
  bool converged = false;
  double eta = 0.0;
  double lambda_initial = 0.0;
  double lambda_alm = 0.0;
  double lambda_l = 0.0;
  MetricReport at_alm;
  MetricReport at_l;
  double lambda_mssim = 0.0;
  double lambda_psnr = 0.0;
  double lambda_cjv = 0.0;

  std::vector<SweepSample> sweep;        // metric-vs-lambda curve, ratio ascending
  std::vector<LCurvePoint> lcurve_points;
};

/// Derived per-run seed; reproducible from (master_seed, ur, nl, run_index).
std::uint64_t run_seed(std::uint64_t master_seed, double ur, double nl, int run_index);

/// One full run: simulate, run the multiplier search, the L-curve baseline
/// and the lambda sweep with metric-optimal refinement; writes per-run
/// artifacts (trace, curves, images) under cfg.output_dir. Never throws for
/// per-run numerical failures; those are flagged on the record.
ExperimentRecord run_cell(double ur, double nl, int run_index, const ExperimentConfig& cfg);

/// All cells x runs with a worker pool; writes records.csv, summary.csv and
/// aggregated cell curves. Returns 0 on success, 2 if any run failed.
int run_grid(const ExperimentConfig& cfg);

/// Dataset export only (mask, k-space, phantom, tissue masks per run).
void simulate_dataset(const ExperimentConfig& cfg);

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<ExperimentRecord>& records);

/// Aggregated mean/sd curves per cell from the per-run sweeps.
void write_cell_curves(const std::filesystem::path& dir,
                       const std::vector<ExperimentRecord>& records);

struct CjvRangeResult {
  double min_cjv = 0.0;
  double max_cjv = 0.0;
  double threshold = 0.0;  // min + (max - min) / 10
  std::vector<std::pair<double, double>> samples;  // (lambda, cjv)
};

/// CJV(lambda) on a uniform grid over [0, lambda_hi]; lambda = 0 is the
/// plain least-squares reconstruction.
CjvRangeResult cjv_range_study(const MriOperator& A, const MultiCoilKSpace& b,
                               const ComplexImage& f, const TissueMasks& masks,
                               const SolverConfig& solver, double lambda_hi = 2.0,
                               int points = 41);

}  // namespace alma
