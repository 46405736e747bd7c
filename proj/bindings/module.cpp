#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alma/alma.hpp"
#include "alma/experiment.hpp"
#include "alma/lcurve.hpp"
#include "alma/metrics.hpp"
#include "alma/phantom.hpp"

namespace py = pybind11;
using namespace alma;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

ComplexImage to_image(const CArray& a) {
  if (a.ndim() != 2) throw shape_error("expected a 2-D complex array");
  ComplexImage x(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), x.data());
  return x;
}

RealImage to_real(const RArray& a) {
  if (a.ndim() != 2) throw shape_error("expected a 2-D array");
  RealImage x(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), x.data());
  return x;
}

BoolImage to_mask(const py::array& a) {
  auto b = py::array_t<bool, py::array::c_style | py::array::forcecast>::ensure(a);
  if (!b || b.ndim() != 2) throw shape_error("expected a 2-D boolean array");
  BoolImage m(static_cast<int>(b.shape(0)), static_cast<int>(b.shape(1)));
  for (py::ssize_t i = 0; i < b.size(); ++i) m.data()[i] = b.data()[i] ? 1 : 0;
  return m;
}

py::array from_image(const ComplexImage& x) {
  CArray out({x.rows(), x.cols()});
  std::copy(x.data(), x.data() + x.size(), out.mutable_data());
  return out;
}

py::array from_mask(const BoolImage& m) {
  py::array_t<bool> out({m.rows(), m.cols()});
  for (std::size_t i = 0; i < m.size(); ++i) out.mutable_data()[i] = m.data()[i] != 0;
  return out;
}

CoilSensitivities to_coils(const CArray& a) {
  if (a.ndim() != 3) throw shape_error("expected coils as a (nCh, rows, cols) complex array");
  CoilSensitivities C;
  const int nch = static_cast<int>(a.shape(0));
  const int rows = static_cast<int>(a.shape(1));
  const int cols = static_cast<int>(a.shape(2));
  auto buf = a.unchecked<3>();
  for (int k = 0; k < nch; ++k) {
    ComplexImage mp(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) mp(i, j) = buf(k, i, j);
    C.maps.push_back(std::move(mp));
  }
  return C;
}

py::array from_coils(const CoilSensitivities& C) {
  CArray out({C.count(), C.rows(), C.cols()});
  auto buf = out.mutable_unchecked<3>();
  for (int k = 0; k < C.count(); ++k)
    for (int i = 0; i < C.rows(); ++i)
      for (int j = 0; j < C.cols(); ++j) buf(k, i, j) = C.maps[k](i, j);
  return out;
}

SamplingMask to_sampling(const IArray& lines, int n_lines) {
  SamplingMask m;
  m.n_lines = n_lines;
  m.acquired.assign(lines.data(), lines.data() + lines.size());
  std::sort(m.acquired.begin(), m.acquired.end());
  m.validate();
  return m;
}

MultiCoilKSpace to_kspace(const CArray& a, const SamplingMask& mask) {
  if (a.ndim() != 3) throw shape_error("expected k-space as a (nCh, nSel, cols) complex array");
  if (static_cast<int>(a.shape(1)) != mask.count())
    throw shape_error("k-space line count does not match the mask");
  MultiCoilKSpace y(mask, static_cast<int>(a.shape(2)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), y.data.data());
  return y;
}

py::array from_kspace(const MultiCoilKSpace& y) {
  CArray out({y.n_coils, y.mask.count(), y.cols});
  std::copy(y.data.begin(), y.data.end(), out.mutable_data());
  return out;
}

SolverConfig solver_from_args(double cg_tol, int cg_max_iter, double admm_rho, int admm_max_iter,
                              double admm_tol, bool admm_adapt_rho) {
  SolverConfig s;
  s.cg_tol = cg_tol;
  s.cg_max_iter = cg_max_iter;
  s.admm_rho = admm_rho;
  s.admm_max_iter = admm_max_iter;
  s.admm_tol = admm_tol;
  s.admm_adapt_rho = admm_adapt_rho;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compressed-sensing MRI reconstruction with automatic tuning-parameter selection";

  py::register_exception<shape_error>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<constraint_infeasible_error>(m, "ConstraintInfeasibleError",
                                                      PyExc_RuntimeError);
  py::register_exception<iteration_limit_error>(m, "IterationLimitError", PyExc_RuntimeError);

  m.def(
      "shepp_logan", [](int n) { return from_image(shepp_logan(n)); }, py::arg("n"),
      "Modified Shepp-Logan phantom on an n x n grid (complex, zero imaginary part).");

  m.def(
      "simulate_coils",
      [](int n, int n_coils) { return from_coils(simulate_coils(n, n_coils)); }, py::arg("n"),
      py::arg("n_coils"), "Smooth complex coil sensitivity maps, shape (n_coils, n, n).");

  m.def(
      "draw_trajectory",
      [](int n_lines, double ur_pct, double center_frac, std::uint64_t seed) {
        SamplingMask mask = draw_trajectory({n_lines, ur_pct, center_frac, seed});
        IArray out(mask.acquired.size());
        std::copy(mask.acquired.begin(), mask.acquired.end(), out.mutable_data());
        return out;
      },
      py::arg("n_lines"), py::arg("ur_pct"), py::arg("center_frac") = 0.30, py::arg("seed") = 0,
      "Acquired line indices (0-based) of a Cartesian undersampling pattern.");

  m.def(
      "dft2_centered", [](const CArray& x) { return from_image(dft2_centered(to_image(x))); },
      py::arg("x"), "Unitary centered 2-D DFT.");
  m.def(
      "idft2_centered", [](const CArray& k) { return from_image(idft2_centered(to_image(k))); },
      py::arg("k"), "Inverse of dft2_centered.");

  m.def(
      "tv_value", [](const CArray& x) { return tv_value(to_image(x)); }, py::arg("x"),
      "Anisotropic total variation (l1 of forward differences, separate re/im).");

  m.def(
      "forward",
      [](const CArray& x, const CArray& coils, const IArray& lines) {
        ComplexImage img = to_image(x);
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, img.rows());
        return from_kspace(forward(img, C, U));
      },
      py::arg("x"), py::arg("coils"), py::arg("lines"),
      "Measurement operator A = U F C; returns (nCh, nSel, cols).");

  m.def(
      "adjoint",
      [](const CArray& y, const CArray& coils, const IArray& lines) {
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, C.rows());
        return from_image(adjoint(to_kspace(y, U), C));
      },
      py::arg("y"), py::arg("coils"), py::arg("lines"), "Adjoint A^H of the forward operator.");

  m.def(
      "gridded_recon",
      [](const CArray& y, const CArray& coils, const IArray& lines) {
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, C.rows());
        return from_image(gridded_recon(to_kspace(y, U), C));
      },
      py::arg("y"), py::arg("coils"), py::arg("lines"),
      "Sensitivity-weighted zero-filled reconstruction.");

  m.def(
      "corrupt",
      [](const CArray& y, const CArray& coils, const IArray& lines, double nl_pct,
         std::uint64_t seed) {
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, C.rows());
        CorruptResult r = corrupt(to_kspace(y, U), {nl_pct, seed});
        return py::make_tuple(from_kspace(r.b), r.eta);
      },
      py::arg("y"), py::arg("coils"), py::arg("lines"), py::arg("nl_pct"), py::arg("seed") = 0,
      "Additive complex Gaussian noise with sigma^2 = |y| * nl_pct; returns (b, eta).");

  m.def(
      "gm_wm_masks",
      [](const CArray& f) {
        TissueMasks t = gm_wm_masks(to_image(f));
        return py::make_tuple(from_mask(t.gm), from_mask(t.wm));
      },
      py::arg("f"), "Grey-/white-matter masks of the clean phantom.");

  m.def(
      "msssim",
      [](const RArray& img, const RArray& ref) { return msssim(to_real(img), to_real(ref)); },
      py::arg("img"), py::arg("ref"), "Multiscale SSIM in [0, 1].");
  m.def(
      "psnr",
      [](const RArray& img, const RArray& ref) { return psnr(to_real(img), to_real(ref)); },
      py::arg("img"), py::arg("ref"), "Peak signal-to-noise ratio in dB.");
  m.def(
      "cjv",
      [](const RArray& img, const py::array& gm, const py::array& wm) {
        return cjv(to_real(img), to_mask(gm), to_mask(wm));
      },
      py::arg("img"), py::arg("gm"), py::arg("wm"),
      "Coefficient of joint variation between the masked regions.");

  m.def(
      "solve_least_squares",
      [](const CArray& b, const CArray& coils, const IArray& lines, double cg_tol,
         int cg_max_iter) {
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, C.rows());
        MultiCoilKSpace y = to_kspace(b, U);
        SolverConfig s;
        s.cg_tol = cg_tol;
        s.cg_max_iter = cg_max_iter;
        MriOperator A(C, U);
        LsqResult r;
        {
          py::gil_scoped_release release;
          r = solve_least_squares(A, y, s);
        }
        return py::make_tuple(from_image(r.x), r.residual_norm);
      },
      py::arg("b"), py::arg("coils"), py::arg("lines"), py::arg("cg_tol") = 1e-8,
      py::arg("cg_max_iter") = 500,
      "Minimum-norm least-squares reconstruction; returns (x, residual_norm).");

  m.def(
      "admm_tv_lasso",
      [](const CArray& b, const CArray& coils, const IArray& lines, double lam, double cg_tol,
         int cg_max_iter, double admm_rho, int admm_max_iter, double admm_tol,
         bool admm_adapt_rho) {
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, C.rows());
        MultiCoilKSpace y = to_kspace(b, U);
        SolverConfig s =
            solver_from_args(cg_tol, cg_max_iter, admm_rho, admm_max_iter, admm_tol,
                             admm_adapt_rho);
        MriOperator A(C, U);
        AdmmResult r;
        {
          py::gil_scoped_release release;
          r = admm_tv_lasso(A, y, lam, s);
        }
        return py::make_tuple(from_image(r.x), r.objective, r.iterations);
      },
      py::arg("b"), py::arg("coils"), py::arg("lines"), py::arg("lam"), py::arg("cg_tol") = 1e-8,
      py::arg("cg_max_iter") = 500, py::arg("admm_rho") = 1.0, py::arg("admm_max_iter") = 300,
      py::arg("admm_tol") = 1e-6, py::arg("admm_adapt_rho") = true,
      "TV-LASSO reconstruction by ADMM; returns (x, objective, iterations).");

  m.def(
      "alma_run",
      [](const CArray& b, const CArray& coils, const IArray& lines, double eta, int n_tau,
         int n_alpha, int n_max, double lambda_rel_tol, double cg_tol, int cg_max_iter,
         double admm_rho, int admm_max_iter, double admm_tol, bool admm_adapt_rho) {
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, C.rows());
        MultiCoilKSpace y = to_kspace(b, U);
        AlmaConfig cfg;
        cfg.n_tau = n_tau;
        cfg.n_alpha = n_alpha;
        cfg.n_max = n_max;
        cfg.lambda_rel_tol = lambda_rel_tol;
        cfg.eta = eta;
        SolverConfig s =
            solver_from_args(cg_tol, cg_max_iter, admm_rho, admm_max_iter, admm_tol,
                             admm_adapt_rho);
        MriOperator A(C, U);
        AlmaResult r;
        {
          py::gil_scoped_release release;
          r = alma_run(A, y, cfg, s);
        }
        py::list trace;
        for (const AlmaIteration& it : r.trace.iterations) {
          py::dict row;
          row["iteration"] = it.iteration;
          row["lambda"] = it.lambda;
          row["slope"] = it.slope;
          row["hull_size"] = it.hull_size;
          row["admm_iters"] = it.admm_iterations;
          row["objective"] = it.objective;
          trace.append(row);
        }
        py::dict out;
        out["lambda"] = r.lambda;
        out["x"] = from_image(r.x);
        out["converged"] = r.converged;
        out["trace"] = trace;
        return out;
      },
      py::arg("b"), py::arg("coils"), py::arg("lines"), py::arg("eta"), py::arg("n_tau") = 201,
      py::arg("n_alpha") = 201, py::arg("n_max") = 100, py::arg("lambda_rel_tol") = 1e-4,
      py::arg("cg_tol") = 1e-8, py::arg("cg_max_iter") = 500, py::arg("admm_rho") = 1.0,
      py::arg("admm_max_iter") = 300, py::arg("admm_tol") = 1e-6,
      py::arg("admm_adapt_rho") = true,
      "Iterative tuning-parameter search; returns {lambda, x, converged, trace}.");

  m.def(
      "lcurve_select",
      [](const CArray& b, const CArray& coils, const IArray& lines,
         const std::vector<double>& grid, double cg_tol, int cg_max_iter, double admm_rho,
         int admm_max_iter, double admm_tol, bool admm_adapt_rho) {
        CoilSensitivities C = to_coils(coils);
        SamplingMask U = to_sampling(lines, C.rows());
        MultiCoilKSpace y = to_kspace(b, U);
        SolverConfig s =
            solver_from_args(cg_tol, cg_max_iter, admm_rho, admm_max_iter, admm_tol,
                             admm_adapt_rho);
        MriOperator A(C, U);
        LCurveResult r;
        {
          py::gil_scoped_release release;
          r = lcurve_select(A, y, grid, s);
        }
        py::list points;
        for (const LCurvePoint& p : r.points)
          points.append(py::make_tuple(p.lambda, p.log_residual, p.log_tv));
        py::dict out;
        out["lambda"] = r.lambda;
        out["x"] = from_image(r.x);
        out["corner_index"] = r.corner_index;
        out["points"] = points;
        return out;
      },
      py::arg("b"), py::arg("coils"), py::arg("lines"), py::arg("grid"), py::arg("cg_tol") = 1e-8,
      py::arg("cg_max_iter") = 500, py::arg("admm_rho") = 1.0, py::arg("admm_max_iter") = 300,
      py::arg("admm_tol") = 1e-6, py::arg("admm_adapt_rho") = true,
      "Maximum-curvature corner of the log residual / log TV curve.");

  m.attr("__version__") = "0.1.0";
}
