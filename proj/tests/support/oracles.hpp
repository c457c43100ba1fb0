#pragma once

// Slow, obviously-correct reference computations the tests compare the
// library against.  Everything here is written independently of the
// production code paths: quadrature is adaptive Simpson instead of
// Gauss-Legendre, the local linear solve is a dense normal-equations
// solve over the full stacked design, and the VAR(1) stationary
// covariance comes from the vectorized Lyapunov equation.

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "flexseas/estimator.hpp"
#include "flexseas/kernel.hpp"
#include "flexseas/model.hpp"

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_impl(const std::function<double(double)>& f,
                                    double a, double b, double whole,
                                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(f, a, m);
  const double right = simpson(f, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_impl(f, a, m, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_impl(f, m, b, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12) {
  return adaptive_simpson_impl(f, a, b, simpson(f, a, b), tol, 40);
}

// Kernel moment integrals done with a completely different quadrature.
inline double kernel_moment(const flexseas::KernelSpec& k, int order,
                            bool squared) {
  const double s = k.support_halfwidth;
  auto integrand = [&](double u) {
    const double kv = flexseas::eval(k, u);
    return std::pow(u, order) * (squared ? kv * kv : kv);
  };
  // Split at zero so the even/odd structure is captured exactly.
  return adaptive_simpson(integrand, -s, 0.0) +
         adaptive_simpson(integrand, 0.0, s);
}

struct WlsFit {
  Eigen::VectorXd theta;
  Eigen::VectorXd theta_prime;
};

// Local linear fit by brute force: stack the d x 2d design
// [A, (t_i - t) A] for every observation, weight rows by the kernel and
// solve the normal equations with a dense pivoted LU.  No shared code
// with the production moment-based solver beyond the kernel itself.
inline WlsFit dense_wls(const flexseas::SeasonalPanel& panel,
                        const flexseas::KernelSpec& kernel, double h,
                        double t) {
  const int n = panel.n();
  const int d = panel.d();
  const flexseas::DesignMatrix design = flexseas::DesignMatrix::build(d);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * d);
  for (int i = 0; i < n; ++i) {
    const double u = panel.t(i) - t;
    const double w = flexseas::eval_scaled(kernel, h, u);
    if (w == 0.0) continue;
    Eigen::MatrixXd x(d, 2 * d);
    x.leftCols(d) = design.A;
    x.rightCols(d) = u * design.A;
    m += w * x.transpose() * x;
    rhs += w * x.transpose() * panel.y.row(i).transpose();
  }
  const Eigen::VectorXd sol = m.fullPivLu().solve(rhs);
  if (!sol.allFinite()) {
    throw std::runtime_error("oracle WLS solve produced non-finite values");
  }
  WlsFit fit;
  fit.theta = sol.head(d);
  fit.theta_prime = sol.tail(d);
  return fit;
}

// Stationary covariance of x_i = phi x_{i-1} + eps_i via the vectorized
// Lyapunov identity (I - phi (x) phi) vec(R0) = vec(sigma).
inline Eigen::MatrixXd lyapunov_r0(const Eigen::MatrixXd& phi,
                                   const Eigen::MatrixXd& sigma) {
  const int d = static_cast<int>(phi.rows());
  Eigen::MatrixXd kron(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      kron.block(i * d, j * d, d, d) = phi(i, j) * phi;
    }
  }
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(d * d, d * d) - kron;
  Eigen::VectorXd vec(d * d);
  for (int j = 0; j < d; ++j) vec.segment(j * d, d) = sigma.col(j);
  const Eigen::VectorXd solved = lhs.fullPivLu().solve(vec);
  Eigen::MatrixXd r0(d, d);
  for (int j = 0; j < d; ++j) r0.col(j) = solved.segment(j * d, d);
  return r0;
}

}  // namespace oracles
