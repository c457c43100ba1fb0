#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "flexseas/asymptotics.hpp"
#include "flexseas/errors.hpp"
#include "flexseas/estimator.hpp"
#include "flexseas/kernel.hpp"
#include "flexseas/model.hpp"
#include "flexseas/serialize.hpp"
#include "flexseas/version.hpp"
#include "flexseas/weakdep.hpp"

namespace py = pybind11;
using namespace flexseas;

namespace {

FitConfig make_fit_config(const std::string& kernel, double bandwidth,
                          double min_denominator) {
  FitConfig cfg;
  cfg.kernel = KernelSpec::from_name(kernel);
  cfg.h = bandwidth;
  cfg.min_denominator = min_denominator;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "local linear estimation of flexible seasonal trends (C++ core)";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "FlexseasError");

  // kernels
  m.def(
      "kernel_eval",
      [](const std::string& name, double u) {
        return eval(KernelSpec::from_name(name), u);
      },
      py::arg("kernel"), py::arg("u"), "K(u), zero outside the support");
  m.def(
      "kernel_eval_scaled",
      [](const std::string& name, double h, double u) {
        return eval_scaled(KernelSpec::from_name(name), h, u);
      },
      py::arg("kernel"), py::arg("h"), py::arg("u"), "K(u/h)/h");
  m.def(
      "kernel_moment",
      [](const std::string& name, int k) {
        return moment(KernelSpec::from_name(name), k);
      },
      py::arg("kernel"), py::arg("k"), "mu_k = integral of u^k K(u)");
  m.def(
      "kernel_sq_moment",
      [](const std::string& name, int k) {
        return sq_moment(KernelSpec::from_name(name), k);
      },
      py::arg("kernel"), py::arg("k"), "nu_k = integral of u^k K(u)^2");

  // model
  m.def(
      "build_design",
      [](int d) {
        const DesignMatrix dm = DesignMatrix::build(d);
        return py::make_tuple(dm.A, dm.A_inv);
      },
      py::arg("d"), "returns (A, A_inv) for d seasons");
  m.def(
      "simulate_panel",
      [](const std::string& config_json, py::object seed) {
        SimulateRequest req = parse_simulate_config(config_json);
        const std::uint64_t s =
            seed.is_none() ? req.seed : seed.cast<std::uint64_t>();
        Eigen::MatrixXd errors =
            req.error ? simulate(*req.error, req.n, s)
                      : Eigen::MatrixXd::Zero(req.n, req.curves.d());
        const SeasonalPanel panel = synthesize_panel(req.curves, errors);
        Eigen::VectorXd ts(panel.n());
        for (int i = 0; i < panel.n(); ++i) ts(i) = panel.t(i);
        py::dict out;
        out["t"] = ts;
        out["y"] = panel.y;
        return out;
      },
      py::arg("config_json"), py::arg("seed") = py::none(),
      "dict with the time grid and panel matrix from a simulate config "
      "(same schema as the CLI)");

  // error processes
  m.def(
      "simulate_errors",
      [](const std::string& spec_json, int n, std::uint64_t seed) {
        return simulate(parse_error_process(spec_json), n, seed);
      },
      py::arg("spec_json"), py::arg("n"), py::arg("seed"));
  m.def(
      "autocov",
      [](const std::string& spec_json, int k) {
        return autocov(parse_error_process(spec_json), k);
      },
      py::arg("spec_json"), py::arg("k"), "analytic R(k)");
  m.def(
      "longrun_sigma0",
      [](const std::string& spec_json, double tol) {
        return longrun_sigma0(parse_error_process(spec_json), tol);
      },
      py::arg("spec_json"), py::arg("tol") = 1e-12,
      "Sigma_0 = R(0) + 2 sum R(k)");
  m.def("empirical_autocov", &empirical_autocov, py::arg("sample"),
        py::arg("k"));
  m.def(
      "dependence_bound",
      [](const std::string& spec_json, int r) {
        return dependence_bound(parse_error_process(spec_json), r);
      },
      py::arg("spec_json"), py::arg("r"),
      "monotone bound dominating ||R(r)||_max");

  // estimator
  m.def(
      "fit_panel",
      [](const Eigen::MatrixXd& y, const std::string& kernel,
         double bandwidth, const std::vector<double>& grid,
         double min_denominator) {
        const SeasonalPanel panel(y);
        const FitConfig cfg =
            make_fit_config(kernel, bandwidth, min_denominator);
        const auto fits = fit_grid(panel, cfg, grid);
        const int d = panel.d();
        Eigen::MatrixXd theta(static_cast<Eigen::Index>(fits.size()), d);
        Eigen::MatrixXd theta_prime(static_cast<Eigen::Index>(fits.size()),
                                    d);
        for (std::size_t i = 0; i < fits.size(); ++i) {
          theta.row(static_cast<Eigen::Index>(i)) =
              fits[i].theta_hat.transpose();
          theta_prime.row(static_cast<Eigen::Index>(i)) =
              fits[i].theta_prime_hat.transpose();
        }
        py::dict out;
        out["t"] = grid;
        out["theta"] = theta;
        out["theta_prime"] = theta_prime;
        return out;
      },
      py::arg("y"), py::arg("kernel") = "epanechnikov",
      py::arg("bandwidth") = 0.1, py::arg("grid") = std::vector<double>{},
      py::arg("min_denominator") = 1e-12,
      "theta_hat and theta_prime_hat rows over the grid");
  m.def(
      "weights",
      [](int n, const std::string& kernel, double h, double t) {
        return weights_for_grid(n, make_fit_config(kernel, h, 1e-12), t);
      },
      py::arg("n"), py::arg("kernel"), py::arg("h"), py::arg("t"),
      "the n local linear weights S_i(t)");
  m.def(
      "theoretical_bias",
      [](const std::string& curves_json, const std::string& kernel, double h,
         double t) {
        return theoretical_bias(parse_curves(curves_json),
                                make_fit_config(kernel, h, 1e-12), t);
      },
      py::arg("curves_json"), py::arg("kernel"), py::arg("h"), py::arg("t"),
      "leading bias term h^2 mu_2 theta''(t) / 2");

  // monte carlo studies
  m.def(
      "run_study",
      [](const std::string& study, const std::string& config_json,
         int threads) {
        const ExperimentConfig cfg =
            parse_experiment_config(config_json, study);
        std::string report_json, summary_csv;
        {
          py::gil_scoped_release release;
          const MonteCarloReport report = run_study(cfg, threads);
          report_json = report.to_json();
          summary_csv = report.summary_csv();
        }
        return py::make_tuple(report_json, summary_csv);
      },
      py::arg("study"), py::arg("config_json"), py::arg("threads") = 1,
      "runs a study; returns (report_json, summary_csv)");
}
