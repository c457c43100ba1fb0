#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "flexseas/kernel.hpp"
#include "flexseas/model.hpp"

namespace flexseas {

struct FitConfig {
  KernelSpec kernel;
  double h = 0.1;                  // bandwidth, 0 < h <= 1
  double min_denominator = 1e-12;  // degeneracy floor for S0*S2 - S1^2
};

struct FitResult {
  double t = 0.0;
  Eigen::VectorXd theta_hat;        // (alpha, beta_1..beta_{d-1})
  Eigen::VectorXd theta_prime_hat;  // derivative estimate, same layout
  std::array<double, 4> s_moments{};  // S_n0..S_n3 at t
  double denominator = 0.0;           // S_n0*S_n2 - S_n1^2
};

/// S_nk(t) = n^-1 sum_i (t_i - t)^k K_h(t_i - t), k in 0..3.
double s_moment(const SeasonalPanel& panel, const FitConfig& cfg, double t,
                int k);

/// T_nk(t) = n^-1 sum_i (t_i - t)^k K_h(t_i - t) Y_i.
Eigen::VectorXd t_moment(const SeasonalPanel& panel, const FitConfig& cfg,
                         double t, int k);

/// The n local-linear weights S_i(t). Throws DegenerateWindow when
/// S_n0*S_n2 - S_n1^2 <= min_denominator.
Eigen::VectorXd weights(const SeasonalPanel& panel, const FitConfig& cfg,
                        double t);

/// Same weights computed from the grid size alone (the weights do not
/// depend on the observations).
Eigen::VectorXd weights_for_grid(int n, const FitConfig& cfg, double t);

/// Local linear fit at t: theta_hat = A^-1 (S2 T0 - S1 T1) / (S0 S2 - S1^2),
/// theta_prime_hat = A^-1 (S0 T1 - S1 T0) / (S0 S2 - S1^2).
/// Throws DomainError for t outside [0,1], BandwidthError for an invalid h,
/// DegenerateWindow when the kernel window holds fewer than 3 grid points
/// or the denominator is below the floor.
FitResult fit_at(const SeasonalPanel& panel, const FitConfig& cfg, double t);

/// Batched fit; per-point errors carry the offending t in their message.
std::vector<FitResult> fit_grid(const SeasonalPanel& panel,
                                const FitConfig& cfg,
                                const std::vector<double>& grid);

/// Leading bias term h^2 mu_2 theta''(t) / 2. Throws ConfigError when the
/// curves carry no second derivatives.
Eigen::VectorXd theoretical_bias(const CurveSet& curves, const FitConfig& cfg,
                                 double t);

}  // namespace flexseas
