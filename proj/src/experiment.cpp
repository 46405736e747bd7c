#include "alma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "alma/io.hpp"
#include "alma/phantom.hpp"

namespace alma {

using nlohmann::json;
namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  if (n < 32) throw config_error("config: n must be at least 32");
  if (n_coils < 1) throw config_error("config: nCh must be at least 1");
  if (ur_list.empty() || nl_list.empty()) throw config_error("config: empty ur/nl list");
  for (double ur : ur_list)
    if (ur <= 0.0 || ur > 1.0) throw config_error("config: ur values must lie in (0, 1]");
  for (double nl : nl_list)
    if (nl < 0.0) throw config_error("config: nl values must be nonnegative");
  if (runs < 1) throw config_error("config: runs must be at least 1");
  if (lambda_sweep.points < 3 || lcurve.points < 3)
    throw config_error("config: sweep/lcurve grids need at least 3 points");
  if (lambda_sweep.decades_below <= 0.0 || lambda_sweep.decades_above < 0.0 ||
      lcurve.decades_below <= 0.0 || lcurve.decades_above < 0.0)
    throw config_error("config: decade spans must be positive");
  if (threads < 1) throw config_error("config: threads must be at least 1");
  solver.validate();
  alma.validate();
}

namespace {

json sweep_to_json(const LambdaSweepConfig& s) {
  return {{"points", s.points},
          {"decades_below", s.decades_below},
          {"decades_above", s.decades_above},
          {"golden_iters", s.golden_iters}};
}

json lcurve_to_json(const LCurveConfig& c) {
  return {{"points", c.points},
          {"decades_below", c.decades_below},
          {"decades_above", c.decades_above}};
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.n = j.value("n", cfg.n);
    cfg.n_coils = j.value("nCh", cfg.n_coils);
    cfg.ur_list = j.value("ur_list", cfg.ur_list);
    cfg.nl_list = j.value("nl_list", cfg.nl_list);
    cfg.runs = j.value("runs", cfg.runs);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.images = j.value("images", cfg.images);
    if (j.contains("lambda_sweep")) {
      const json& s = j["lambda_sweep"];
      cfg.lambda_sweep.points = s.value("points", cfg.lambda_sweep.points);
      cfg.lambda_sweep.decades_below = s.value("decades_below", cfg.lambda_sweep.decades_below);
      cfg.lambda_sweep.decades_above = s.value("decades_above", cfg.lambda_sweep.decades_above);
      cfg.lambda_sweep.golden_iters = s.value("golden_iters", cfg.lambda_sweep.golden_iters);
    }
    if (j.contains("lcurve")) {
      const json& s = j["lcurve"];
      cfg.lcurve.points = s.value("points", cfg.lcurve.points);
      cfg.lcurve.decades_below = s.value("decades_below", cfg.lcurve.decades_below);
      cfg.lcurve.decades_above = s.value("decades_above", cfg.lcurve.decades_above);
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      cfg.solver.cg_tol = s.value("cg_tol", cfg.solver.cg_tol);
      cfg.solver.cg_max_iter = s.value("cg_max_iter", cfg.solver.cg_max_iter);
      cfg.solver.admm_rho = s.value("admm_rho", cfg.solver.admm_rho);
      cfg.solver.admm_max_iter = s.value("admm_max_iter", cfg.solver.admm_max_iter);
      cfg.solver.admm_tol = s.value("admm_tol", cfg.solver.admm_tol);
      cfg.solver.admm_adapt_rho = s.value("admm_adapt_rho", cfg.solver.admm_adapt_rho);
    }
    if (j.contains("alma")) {
      const json& s = j["alma"];
      cfg.alma.n_tau = s.value("n_tau", cfg.alma.n_tau);
      cfg.alma.n_alpha = s.value("n_alpha", cfg.alma.n_alpha);
      cfg.alma.n_max = s.value("n_max", cfg.alma.n_max);
      cfg.alma.lambda_rel_tol = s.value("lambda_rel_tol", cfg.alma.lambda_rel_tol);
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("config: bad field type: ") + e.what());
  }
  return cfg;
}

ExperimentConfig experiment_config_from_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw config_error("config: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return experiment_config_from_json(ss.str());
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json j{{"n", cfg.n},
         {"nCh", cfg.n_coils},
         {"ur_list", cfg.ur_list},
         {"nl_list", cfg.nl_list},
         {"runs", cfg.runs},
         {"master_seed", cfg.master_seed},
         {"output_dir", cfg.output_dir},
         {"threads", cfg.threads},
         {"images", cfg.images},
         {"lambda_sweep", sweep_to_json(cfg.lambda_sweep)},
         {"lcurve", lcurve_to_json(cfg.lcurve)},
         {"solver",
          {{"cg_tol", cfg.solver.cg_tol},
           {"cg_max_iter", cfg.solver.cg_max_iter},
           {"admm_rho", cfg.solver.admm_rho},
           {"admm_max_iter", cfg.solver.admm_max_iter},
           {"admm_tol", cfg.solver.admm_tol},
           {"admm_adapt_rho", cfg.solver.admm_adapt_rho}}},
         {"alma",
          {{"n_tau", cfg.alma.n_tau},
           {"n_alpha", cfg.alma.n_alpha},
           {"n_max", cfg.alma.n_max},
           {"lambda_rel_tol", cfg.alma.lambda_rel_tol}}}};
  return j.dump(2);
}

std::uint64_t run_seed(std::uint64_t master_seed, double ur, double nl, int run_index) {
  std::uint64_t h = mix_seed(master_seed);
  h = mix_seed(h ^ static_cast<std::uint64_t>(std::llround(ur * 1e6)));
  h = mix_seed(h ^ static_cast<std::uint64_t>(std::llround(nl * 1e6)));
  h = mix_seed(h ^ static_cast<std::uint64_t>(run_index));
  return h;
}

namespace {

std::string cell_tag(double ur, double nl) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "ur%02d_nl%02d", static_cast<int>(std::lround(ur * 100)),
                static_cast<int>(std::lround(nl * 100)));
  return buf;
}

std::string run_tag(double ur, double nl, int run_index) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s_r%03d", cell_tag(ur, nl).c_str(), run_index);
  return buf;
}

// Ratio grid for the sweep: exponents uniform over [-decades_below,
// decades_above], hitting 0 exactly whenever the grid passes through it.
std::vector<double> ratio_grid(const LambdaSweepConfig& s) {
  std::vector<double> r(s.points);
  for (int k = 0; k < s.points; ++k) {
    double e = (-s.decades_below * (s.points - 1 - k) + s.decades_above * k) / (s.points - 1);
    r[k] = std::pow(10.0, e);
  }
  return r;
}

struct MetricOptimum {
  double lambda = 0.0;
  double value = 0.0;
  int grid_index = 0;
  ComplexImage x;
};

// Golden-section refinement (on log lambda) between the grid neighbors of a
// grid optimum. `better(a, b)` orders metric values; evaluations chain warm
// starts. Keeps whatever evaluated point was best, grid optimum included.
MetricOptimum golden_refine(const MriOperator& A, const MultiCoilKSpace& b,
                            const SolverConfig& solver, const ComplexImage& f,
                            const TissueMasks& masks,
                            const std::function<double(const MetricReport&)>& pick,
                            const std::function<bool(double, double)>& better,
                            MetricOptimum seed, double lo, double hi, int iters) {
  if (iters <= 0 || !(hi > lo)) return seed;
  AdmmState state;
  ComplexImage x_init = seed.x;
  auto eval = [&](double lambda) {
    AdmmResult r = admm_tv_lasso(A, b, lambda, solver, x_init, &state);
    double v = pick(evaluate_metrics(r.x, f, masks));
    if (better(v, seed.value)) {
      seed.value = v;
      seed.lambda = lambda;
      seed.x = std::move(r.x);
    }
    return v;
  };

  const double phi = 0.6180339887498949;
  double a = std::log(lo), c = std::log(hi);
  double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
  double f1 = eval(std::exp(x1));
  double f2 = eval(std::exp(x2));
  for (int i = 2; i < iters; ++i) {
    if (better(f1, f2)) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - phi * (c - a);
      f1 = eval(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (c - a);
      f2 = eval(std::exp(x2));
    }
  }
  return seed;
}

}  // namespace

CjvRangeResult cjv_range_study(const MriOperator& A, const MultiCoilKSpace& b,
                               const ComplexImage& f, const TissueMasks& masks,
                               const SolverConfig& solver, double lambda_hi, int points) {
  if (points < 2 || !(lambda_hi > 0.0)) throw config_error("cjv_range_study: bad grid");
  CjvRangeResult out;
  out.samples.reserve(points);
  AdmmState state;
  ComplexImage x_init = gridded_recon(b, A.coils());
  for (int k = 0; k < points; ++k) {
    const double lambda = lambda_hi * k / (points - 1);
    ComplexImage x;
    if (lambda == 0.0) {
      x = solve_least_squares(A, b, solver).x;  // unregularized limit
    } else {
      x = admm_tv_lasso(A, b, lambda, solver, x_init, &state).x;
    }
    double v = evaluate_metrics(x, f, masks).cjv;
    out.samples.emplace_back(lambda, v);
  }
  out.min_cjv = out.samples.front().second;
  out.max_cjv = out.samples.front().second;
  for (auto& [l, v] : out.samples) {
    out.min_cjv = std::min(out.min_cjv, v);
    out.max_cjv = std::max(out.max_cjv, v);
  }
  out.threshold = out.min_cjv + (out.max_cjv - out.min_cjv) / 10.0;
  return out;
}

ExperimentRecord run_cell(double ur, double nl, int run_index, const ExperimentConfig& cfg) {
  ExperimentRecord rec;
  rec.ur_pct = ur;
  rec.nl_pct = nl;
  rec.run_index = run_index;
  rec.seed = run_seed(cfg.master_seed, ur, nl, run_index);

  try {
    const ComplexImage f = shepp_logan(cfg.n);
    const CoilSensitivities C = simulate_coils(cfg.n, cfg.n_coils);
    const TissueMasks masks = gm_wm_masks(f);
    const SamplingMask U = draw_trajectory({cfg.n, ur, 0.30, mix_seed(rec.seed + 1)});
    const MriOperator A(C, U);

    const MultiCoilKSpace y = simulate_acquisition(f, C, U);
    CorruptResult noisy = corrupt(y, {nl, mix_seed(rec.seed + 2)});
    rec.eta = noisy.eta;
    const MultiCoilKSpace& b = noisy.b;

    AlmaConfig acfg = cfg.alma;
    acfg.eta = noisy.eta;
    AlmaResult alma = alma_run(A, b, acfg, cfg.solver);
    rec.lambda_alm = alma.lambda;
    rec.iterations = static_cast<int>(alma.trace.iterations.size());
    rec.converged = alma.converged;
    rec.lambda_initial = alma.trace.iterations.front().lambda;
    rec.at_alm = evaluate_metrics(alma.x, f, masks);

    const fs::path out(cfg.output_dir);
    const std::string tag = run_tag(ur, nl, run_index);
    write_trace_csv(out / "traces" / (tag + ".csv"), alma.trace);

    // L-curve baseline on a grid centered at the first-iteration estimate.
    std::vector<double> lgrid =
        log_grid(rec.lambda_initial * std::pow(10.0, -cfg.lcurve.decades_below),
                 rec.lambda_initial * std::pow(10.0, cfg.lcurve.decades_above), cfg.lcurve.points);
    LCurveResult lc = lcurve_select(A, b, lgrid, cfg.solver);
    rec.lambda_l = lc.lambda;
    rec.at_l = evaluate_metrics(lc.x, f, masks);
    rec.lcurve_points = lc.points;
    fs::create_directories(out / "curves");
    {
      std::ofstream lf(out / "curves" / ("lcurve_" + tag + ".csv"));
      lf << "lambda,log_residual,log_tv\n";
      for (const LCurvePoint& p : lc.points)
        lf << format_double(p.lambda) << ',' << format_double(p.log_residual) << ','
           << format_double(p.log_tv) << "\n";
    }

    // Metric-vs-lambda sweep around lambda_alm, warm-started descending.
    const std::vector<double> ratios = ratio_grid(cfg.lambda_sweep);
    rec.sweep.assign(ratios.size(), {});
    MetricOptimum best_mssim, best_psnr, best_cjv;
    best_psnr.value = -std::numeric_limits<double>::infinity();
    best_mssim.value = -std::numeric_limits<double>::infinity();
    best_cjv.value = std::numeric_limits<double>::infinity();
    {
      AdmmState state;
      for (int k = static_cast<int>(ratios.size()) - 1; k >= 0; --k) {
        const double lambda = ratios[k] * rec.lambda_alm;
        AdmmResult r = admm_tv_lasso(A, b, lambda, cfg.solver, alma.x, &state);
        MetricReport m = evaluate_metrics(r.x, f, masks);
        rec.sweep[k] = {ratios[k], lambda, m.mssim, m.psnr_db, m.cjv};
        if (m.mssim > best_mssim.value) best_mssim = {lambda, m.mssim, k, r.x};
        if (m.psnr_db > best_psnr.value) best_psnr = {lambda, m.psnr_db, k, r.x};
        if (m.cjv < best_cjv.value) best_cjv = {lambda, m.cjv, k, std::move(r.x)};
      }
    }
    {
      std::ofstream cf(out / "curves" / ("run_" + tag + ".csv"));
      cf << "ratio,lambda,mssim,psnr_db,cjv\n";
      for (const SweepSample& s : rec.sweep)
        cf << format_double(s.ratio) << ',' << format_double(s.lambda) << ','
           << format_double(s.mssim) << ',' << format_double(s.psnr_db) << ','
           << format_double(s.cjv) << "\n";
    }

    // One golden-section pass between the neighbors of each grid optimum.
    auto bracket = [&](int idx) {
      double lo = ratios[std::max(idx - 1, 0)] * rec.lambda_alm;
      double hi = ratios[std::min<std::size_t>(idx + 1, ratios.size() - 1)] * rec.lambda_alm;
      return std::pair<double, double>(lo, hi);
    };
    auto maximize = [](double a, double b) { return a > b; };
    auto minimize = [](double a, double b) { return a < b; };

    auto [mlo, mhi] = bracket(best_mssim.grid_index);
    best_mssim = golden_refine(
        A, b, cfg.solver, f, masks, [](const MetricReport& m) { return m.mssim; }, maximize,
        std::move(best_mssim), mlo, mhi, cfg.lambda_sweep.golden_iters);
    auto [plo, phi_] = bracket(best_psnr.grid_index);
    best_psnr = golden_refine(
        A, b, cfg.solver, f, masks, [](const MetricReport& m) { return m.psnr_db; }, maximize,
        std::move(best_psnr), plo, phi_, cfg.lambda_sweep.golden_iters);
    auto [clo, chi] = bracket(best_cjv.grid_index);
    best_cjv = golden_refine(
        A, b, cfg.solver, f, masks, [](const MetricReport& m) { return m.cjv; }, minimize,
        std::move(best_cjv), clo, chi, cfg.lambda_sweep.golden_iters);

    rec.lambda_mssim = best_mssim.lambda;
    rec.lambda_psnr = best_psnr.lambda;
    rec.lambda_cjv = best_cjv.lambda;

    if (cfg.images) {
      const double peak = max_value(magnitude(f));
      const fs::path imgdir = out / "images" / tag;
      write_pgm16(imgdir / "recon_alm.pgm", alma.x, peak);
      write_pgm16(imgdir / "recon_lcurve.pgm", lc.x, peak);
      write_pgm16(imgdir / "recon_mssim.pgm", best_mssim.x, peak);
      // Power-of-ten gallery.
      AdmmState state;
      ComplexImage x_init = alma.x;
      for (int e = -3; e <= 1; ++e) {
        AdmmResult r = admm_tv_lasso(A, b, std::pow(10.0, e), cfg.solver, x_init, &state);
        char name[32];
        std::snprintf(name, sizeof(name), "recon_lambda_1e%+d.pgm", e);
        write_pgm16(imgdir / name, r.x, peak);
      }
    }

    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    rec.error = msg;
  }
  return rec;
}

namespace {

void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

const std::vector<std::string> kRecordHeader = {
    "ur_pct",        "nl_pct",       "run_index",      "seed",          "status",
    "iterations",    "converged",    "eta",            "lambda_initial", "lambda_alm",
    "lambda_l",      "mssim_alm",    "psnr_alm",       "cjv_alm",       "mssim_l",
    "psnr_l",        "cjv_l",        "lambda_mssim",   "lambda_psnr",   "lambda_cjv",
    "ratio_mssim_alm", "ratio_psnr_alm", "ratio_cjv_alm", "ratio_mssim_l", "ratio_psnr_l",
    "ratio_cjv_l"};

double safe_ratio(double num, double den) { return den != 0.0 ? num / den : 0.0; }

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

void write_records_csv(const fs::path& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream f;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  f.open(path);
  if (!f) throw config_error("cannot write " + path.string());
  f << csv_row(kRecordHeader);
  for (const ExperimentRecord& r : records) {
    std::vector<std::string> row = {
        format_double(r.ur_pct),
        format_double(r.nl_pct),
        std::to_string(r.run_index),
        std::to_string(r.seed),
        r.ok ? "ok" : ("failed:" + r.error),
        std::to_string(r.iterations),
        r.converged ? "1" : "0",
        format_double(r.eta),
        format_double(r.lambda_initial),
        format_double(r.lambda_alm),
        format_double(r.lambda_l),
        format_double(r.at_alm.mssim),
        format_double(r.at_alm.psnr_db),
        format_double(r.at_alm.cjv),
        format_double(r.at_l.mssim),
        format_double(r.at_l.psnr_db),
        format_double(r.at_l.cjv),
        format_double(r.lambda_mssim),
        format_double(r.lambda_psnr),
        format_double(r.lambda_cjv),
        format_double(safe_ratio(r.lambda_mssim, r.lambda_alm)),
        format_double(safe_ratio(r.lambda_psnr, r.lambda_alm)),
        format_double(safe_ratio(r.lambda_cjv, r.lambda_alm)),
        format_double(safe_ratio(r.lambda_mssim, r.lambda_l)),
        format_double(safe_ratio(r.lambda_psnr, r.lambda_l)),
        format_double(safe_ratio(r.lambda_cjv, r.lambda_l)),
    };
    f << csv_row(row);
  }
}

std::vector<ExperimentRecord> read_records_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw config_error("empty records file");
  std::vector<ExperimentRecord> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != kRecordHeader.size())
      throw config_error("records row has wrong arity: " + line);
    ExperimentRecord r;
    int i = 0;
    r.ur_pct = std::stod(cells[i++]);
    r.nl_pct = std::stod(cells[i++]);
    r.run_index = std::stoi(cells[i++]);
    r.seed = std::stoull(cells[i++]);
    std::string status = cells[i++];
    r.ok = status == "ok";
    if (!r.ok && status.starts_with("failed:")) r.error = status.substr(7);
    r.iterations = std::stoi(cells[i++]);
    r.converged = cells[i++] == "1";
    r.eta = std::stod(cells[i++]);
    r.lambda_initial = std::stod(cells[i++]);
    r.lambda_alm = std::stod(cells[i++]);
    r.lambda_l = std::stod(cells[i++]);
    r.at_alm.mssim = std::stod(cells[i++]);
    r.at_alm.psnr_db = std::stod(cells[i++]);
    r.at_alm.cjv = std::stod(cells[i++]);
    r.at_l.mssim = std::stod(cells[i++]);
    r.at_l.psnr_db = std::stod(cells[i++]);
    r.at_l.cjv = std::stod(cells[i++]);
    r.lambda_mssim = std::stod(cells[i++]);
    r.lambda_psnr = std::stod(cells[i++]);
    r.lambda_cjv = std::stod(cells[i++]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(const fs::path& path, const std::vector<ExperimentRecord>& records) {
  // Group by (ur, nl) preserving first-seen order.
  std::vector<std::pair<double, double>> cells;
  std::map<std::pair<double, double>, std::vector<const ExperimentRecord*>> groups;
  for (const ExperimentRecord& r : records) {
    auto key = std::make_pair(r.ur_pct, r.nl_pct);
    if (!groups.count(key)) cells.push_back(key);
    groups[key].push_back(&r);
  }

  struct Quantity {
    const char* name;
    std::function<double(const ExperimentRecord&)> get;
  };
  const std::vector<Quantity> quantities = {
      {"iterations", [](const ExperimentRecord& r) { return double(r.iterations); }},
      {"lambda_alm", [](const ExperimentRecord& r) { return r.lambda_alm; }},
      {"lambda_l", [](const ExperimentRecord& r) { return r.lambda_l; }},
      {"mssim_alm", [](const ExperimentRecord& r) { return r.at_alm.mssim; }},
      {"psnr_alm", [](const ExperimentRecord& r) { return r.at_alm.psnr_db; }},
      {"cjv_alm", [](const ExperimentRecord& r) { return r.at_alm.cjv; }},
      {"mssim_l", [](const ExperimentRecord& r) { return r.at_l.mssim; }},
      {"psnr_l", [](const ExperimentRecord& r) { return r.at_l.psnr_db; }},
      {"cjv_l", [](const ExperimentRecord& r) { return r.at_l.cjv; }},
      {"ratio_mssim_alm",
       [](const ExperimentRecord& r) { return safe_ratio(r.lambda_mssim, r.lambda_alm); }},
      {"ratio_psnr_alm",
       [](const ExperimentRecord& r) { return safe_ratio(r.lambda_psnr, r.lambda_alm); }},
      {"ratio_cjv_alm",
       [](const ExperimentRecord& r) { return safe_ratio(r.lambda_cjv, r.lambda_alm); }},
      {"ratio_mssim_l",
       [](const ExperimentRecord& r) { return safe_ratio(r.lambda_mssim, r.lambda_l); }},
      {"ratio_psnr_l",
       [](const ExperimentRecord& r) { return safe_ratio(r.lambda_psnr, r.lambda_l); }},
      {"ratio_cjv_l",
       [](const ExperimentRecord& r) { return safe_ratio(r.lambda_cjv, r.lambda_l); }},
  };

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw config_error("cannot write " + path.string());
  std::vector<std::string> header = {"ur_pct", "nl_pct", "runs_ok"};
  for (const Quantity& q : quantities) {
    header.push_back(std::string(q.name) + "_mean");
    header.push_back(std::string(q.name) + "_sd");
  }
  f << csv_row(header);

  for (auto& key : cells) {
    std::vector<std::string> row = {format_double(key.first), format_double(key.second)};
    std::vector<const ExperimentRecord*> ok;
    for (const ExperimentRecord* r : groups[key])
      if (r->ok) ok.push_back(r);
    row.push_back(std::to_string(ok.size()));
    for (const Quantity& q : quantities) {
      std::vector<double> v;
      v.reserve(ok.size());
      for (const ExperimentRecord* r : ok) v.push_back(q.get(*r));
      Stats s = stats_of(v);
      row.push_back(format_double(s.mean));
      row.push_back(format_double(s.sd));
    }
    f << csv_row(row);
  }
}

void write_cell_curves(const fs::path& dir, const std::vector<ExperimentRecord>& records) {
  std::vector<std::pair<double, double>> cells;
  std::map<std::pair<double, double>, std::vector<const ExperimentRecord*>> groups;
  for (const ExperimentRecord& r : records) {
    if (!r.ok || r.sweep.empty()) continue;
    auto key = std::make_pair(r.ur_pct, r.nl_pct);
    if (!groups.count(key)) cells.push_back(key);
    groups[key].push_back(&r);
  }
  fs::create_directories(dir);
  for (auto& key : cells) {
    const auto& runs = groups[key];
    const std::size_t npts = runs.front()->sweep.size();
    std::ofstream f(dir / ("cell_" + cell_tag(key.first, key.second) + ".csv"));
    f << "ratio,mssim_mean,mssim_sd,psnr_mean,psnr_sd,cjv_mean,cjv_sd\n";
    for (std::size_t k = 0; k < npts; ++k) {
      std::vector<double> ms, ps, cs;
      for (const ExperimentRecord* r : runs) {
        if (r->sweep.size() != npts) continue;
        ms.push_back(r->sweep[k].mssim);
        ps.push_back(r->sweep[k].psnr_db);
        cs.push_back(r->sweep[k].cjv);
      }
      Stats sm = stats_of(ms), sp = stats_of(ps), sc = stats_of(cs);
      f << format_double(runs.front()->sweep[k].ratio) << ',' << format_double(sm.mean) << ','
        << format_double(sm.sd) << ',' << format_double(sp.mean) << ',' << format_double(sp.sd)
        << ',' << format_double(sc.mean) << ',' << format_double(sc.sd) << "\n";
    }
  }
}

int run_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    double ur, nl;
    int run;
  };
  std::vector<Task> tasks;
  for (double ur : cfg.ur_list)
    for (double nl : cfg.nl_list)
      for (int r = 0; r < cfg.runs; ++r) tasks.push_back({ur, nl, r});

  std::vector<ExperimentRecord> records(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int i) {
    records[i] = run_cell(tasks[i].ur, tasks[i].nl, tasks[i].run, cfg);
  });

  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  write_records_csv(out / "records.csv", records);
  write_summary_csv(out / "summary.csv", records);
  write_cell_curves(out / "curves", records);

  if (cfg.images) {
    const ComplexImage f = shepp_logan(cfg.n);
    const TissueMasks masks = gm_wm_masks(f);
    const double peak = max_value(magnitude(f));
    write_pgm16(out / "images" / "phantom.pgm", f, peak);
    write_pgm16(out / "images" / "mask_gm.pgm", masks.gm);
    write_pgm16(out / "images" / "mask_wm.pgm", masks.wm);
  }

  bool any_failed = std::any_of(records.begin(), records.end(),
                                [](const ExperimentRecord& r) { return !r.ok; });
  return any_failed ? 2 : 0;
}

void simulate_dataset(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path out = fs::path(cfg.output_dir) / "dataset";
  const ComplexImage f = shepp_logan(cfg.n);
  const CoilSensitivities C = simulate_coils(cfg.n, cfg.n_coils);
  const TissueMasks masks = gm_wm_masks(f);
  const double peak = max_value(magnitude(f));
  fs::create_directories(out);
  write_pgm16(out / "phantom.pgm", f, peak);
  write_pgm16(out / "mask_gm.pgm", masks.gm);
  write_pgm16(out / "mask_wm.pgm", masks.wm);

  for (double ur : cfg.ur_list) {
    for (double nl : cfg.nl_list) {
      for (int r = 0; r < cfg.runs; ++r) {
        const std::uint64_t seed = run_seed(cfg.master_seed, ur, nl, r);
        const SamplingMask U = draw_trajectory({cfg.n, ur, 0.30, mix_seed(seed + 1)});
        const MultiCoilKSpace y = simulate_acquisition(f, C, U);
        const CorruptResult noisy = corrupt(y, {nl, mix_seed(seed + 2)});
        const fs::path dir = out / run_tag(ur, nl, r);
        fs::create_directories(dir);
        write_mask_text(dir / "mask.txt", U);
        write_kspace(dir / "kspace.bin", noisy.b, seed, noisy.eta);
      }
    }
  }
}

}  // namespace alma
