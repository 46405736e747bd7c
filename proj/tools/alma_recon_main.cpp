#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "alma/experiment.hpp"
#include "alma/io.hpp"
#include "alma/phantom.hpp"

namespace fs = std::filesystem;
using namespace alma;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> scale;
  std::optional<int> runs;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment configuration");
  cmd->add_option("--seed", o.seed, "master seed override");
  cmd->add_option("--out", o.out, "output directory override");
  cmd->add_option("--scale", o.scale, "image size override (desk-scale runs)");
  cmd->add_option("--runs", o.runs, "runs per (UR, NL) cell override");
  cmd->add_option("--threads", o.threads, "worker threads override");
}

ExperimentConfig load_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = experiment_config_from_file(o.config_path);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  if (o.scale) cfg.n = *o.scale;
  if (o.runs) cfg.runs = *o.runs;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

int cmd_simulate(const CommonOpts& o) {
  ExperimentConfig cfg = load_config(o);
  simulate_dataset(cfg);
  std::cout << "dataset written to " << (fs::path(cfg.output_dir) / "dataset").string() << "\n";
  return 0;
}

int cmd_run(const CommonOpts& o) {
  ExperimentConfig cfg = load_config(o);
  int code = run_grid(cfg);
  std::cout << "records: " << (fs::path(cfg.output_dir) / "records.csv").string() << "\n"
            << "summary: " << (fs::path(cfg.output_dir) / "summary.csv").string() << "\n";
  if (code != 0) std::cerr << "warning: some runs failed; see records.csv status column\n";
  return code;
}

int cmd_sweep(const CommonOpts& o, double ur, double nl, int run_index, bool cjv_range) {
  ExperimentConfig cfg = load_config(o);
  cfg.ur_list = {ur};
  cfg.nl_list = {nl};

  ExperimentRecord rec = run_cell(ur, nl, run_index, cfg);
  if (!rec.ok) {
    std::cerr << "run failed: " << rec.error << "\n";
    return 2;
  }
  write_records_csv(fs::path(cfg.output_dir) / "records.csv", {rec});
  std::cout << "lambda_alm=" << rec.lambda_alm << " lambda_l=" << rec.lambda_l
            << " mssim=" << rec.at_alm.mssim << " psnr=" << rec.at_alm.psnr_db
            << " cjv=" << rec.at_alm.cjv << " iterations=" << rec.iterations << "\n";

  if (cjv_range) {
    const ComplexImage f = shepp_logan(cfg.n);
    const CoilSensitivities C = simulate_coils(cfg.n, cfg.n_coils);
    const TissueMasks masks = gm_wm_masks(f);
    const SamplingMask U = draw_trajectory({cfg.n, ur, 0.30, mix_seed(rec.seed + 1)});
    const MriOperator A(C, U);
    const MultiCoilKSpace y = simulate_acquisition(f, C, U);
    const CorruptResult noisy = corrupt(y, {nl, mix_seed(rec.seed + 2)});
    CjvRangeResult cr = cjv_range_study(A, noisy.b, f, masks, cfg.solver);
    std::ofstream cf(fs::path(cfg.output_dir) / "cjv_range.csv");
    cf << "lambda,cjv\n";
    for (auto& [l, v] : cr.samples) cf << format_double(l) << ',' << format_double(v) << "\n";
    std::cout << "cjv range: min=" << cr.min_cjv << " max=" << cr.max_cjv
              << " threshold=" << cr.threshold << "\n";
  }
  return 0;
}

int cmd_report(const CommonOpts& o) {
  ExperimentConfig cfg = load_config(o);
  const fs::path out(cfg.output_dir);
  auto records = read_records_csv(out / "records.csv");
  write_summary_csv(out / "summary.csv", records);
  std::cout << "summary rewritten from " << records.size() << " records\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed-sensing MRI reconstruction with automatic tuning-parameter selection"};
  app.require_subcommand(1);

  CommonOpts o_sim, o_run, o_sweep, o_report;
  double ur = 0.20, nl = 0.03;
  int run_index = 0;
  bool cjv_range = false;

  CLI::App* sim = app.add_subcommand("simulate", "generate and export the simulated dataset");
  add_common(sim, o_sim);
  CLI::App* run = app.add_subcommand("run", "run the full experiment grid");
  add_common(run, o_run);
  CLI::App* sweep = app.add_subcommand("sweep", "run one cell and sweep lambda");
  add_common(sweep, o_sweep);
  sweep->add_option("--ur", ur, "undersampling rate");
  sweep->add_option("--nl", nl, "noise level");
  sweep->add_option("--run-index", run_index, "run index within the cell");
  sweep->add_flag("--cjv-range", cjv_range, "also evaluate CJV over lambda in [0, 2]");
  CLI::App* report = app.add_subcommand("report", "re-aggregate summary.csv from records.csv");
  add_common(report, o_report);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(o_sim);
    if (run->parsed()) return cmd_run(o_run);
    if (sweep->parsed()) return cmd_sweep(o_sweep, ur, nl, run_index, cjv_range);
    if (report->parsed()) return cmd_report(o_report);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
