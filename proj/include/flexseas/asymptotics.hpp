#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flexseas/estimator.hpp"
#include "flexseas/model.hpp"
#include "flexseas/weakdep.hpp"

namespace flexseas {

/// Bandwidth rule for a Monte Carlo experiment: either one fixed h per
/// sample size (lists zipped together) or the power rule h = c * n^{-1/5}.
struct HRule {
  enum class Kind { Fixed, Power };
  Kind kind = Kind::Fixed;
  std::vector<double> values;  // Fixed: one per entry of n_list
  double c = 1.0;              // Power: h = c * n^{-1/5}

  double h_for(int idx, int n) const;
};

/// One Monte Carlo experiment. Parsed from JSON by serialize.cpp; the
/// defaulted members match the documented config schema.
struct ExperimentConfig {
  std::string study;  // "bias" | "clt" | "lemma6" | "rate"

  std::optional<CurveSet> curves;  // absent: pure-noise panels (lemma6)
  std::string curves_echo;         // short description for reports

  std::optional<ErrorProcessSpec> error;  // absent: noiseless panels (rate)
  std::string error_echo;

  KernelSpec kernel;
  std::vector<int> n_list;
  HRule h_rule;
  std::vector<double> eval_points;
  int replications = 1000;
  std::uint64_t base_seed = 1;

  std::string raw_json;  // pretty-printed echo of the parsed config
  std::uint64_t config_hash = 0;

  /// Throws ConfigError on structural problems: unknown study, empty
  /// n_list, replications < 100, eval points not interior to every
  /// (n, h) window (min(t, 1-t) must exceed h * kernel support), study
  /// and curve/error requirements out of sync.
  void validate() const;
};

/// Per-(n, h, t) Monte Carlo summaries. Vectors are indexed by theta
/// component (alpha first, then beta_1..beta_d).
struct CellStats {
  int n = 0;
  double h = 0.0;
  double t = 0.0;
  int replications = 0;

  // bias study
  Eigen::VectorXd mean_error;   // mean of theta_hat - theta over reps
  Eigen::VectorXd bias_theory;  // (h^2/2) mu_2 theta''(t)
  double resid_rms = 0.0;       // rms of the centered error, vs (nh)^-1/2

  // clt study
  Eigen::MatrixXd z_cov;             // covariance of sqrt(nh) (theta_hat - theta)
  Eigen::MatrixXd sigma_theta;       // nu_0 A^-1 Sigma_0 A^-T
  std::vector<double> ks;            // per-component KS distance to N(0,1)
  std::vector<double> coverage;      // per-component 95% CI coverage
  std::vector<double> skewness;
  std::vector<double> excess_kurtosis;

  // lemma6 study
  Eigen::MatrixXd b0_cov;            // covariance of B_n0
  Eigen::MatrixXd b0_limit;          // nu_0 Sigma_0
  double b1_mean_sq = 0.0;           // mean of ||B_n1||^2

  // rate study
  double rmse = 0.0;                 // sqrt(mean ||theta_hat - theta||^2 / d+1)
};

struct RateFit {
  double slope = 0.0;     // d log rmse / d log n, least squares
  double stderr_ = 0.0;
  double intercept = 0.0;
};

struct MonteCarloReport {
  std::string study;
  std::string config_echo;
  std::uint64_t config_hash = 0;
  int threads_used = 1;
  std::vector<CellStats> cells;

  // rate study extras
  std::vector<double> rmse_by_n;
  std::optional<RateFit> rate;
  bool rate_skipped = false;  // true for noiseless panels (rmse is bias only)

  std::string to_json() const;
  std::string summary_csv() const;
};

/// Theorem 1 check: mean estimation error against the h^2 mu_2/2 curvature
/// bias across the configured (n, h, t) grid.
MonteCarloReport run_bias_study(const ExperimentConfig& cfg, int threads = 1);

/// Theorem 2 check: distribution of sqrt(nh) (theta_hat - theta) against
/// N(0, nu_0 A^-1 Sigma_0 A^-T).
MonteCarloReport run_clt_study(const ExperimentConfig& cfg, int threads = 1);

/// Lemma 6 check: covariance of B_n0 against nu_0 Sigma_0 and the O(h^2)
/// decay of E ||B_n1||^2.
MonteCarloReport run_lemma6_study(const ExperimentConfig& cfg,
                                  int threads = 1);

/// Convergence-rate check: log-log regression of the bias-centered rmse
/// on nh under the h = c n^{-1/5} rule, expected slope -1/2.
MonteCarloReport run_rate_study(const ExperimentConfig& cfg, int threads = 1);

/// Dispatch on cfg.study.
MonteCarloReport run_study(const ExperimentConfig& cfg, int threads = 1);

// Small reusable sample statistics (exposed for tests).
double ks_distance_to_normal(std::vector<double> sample);
double sample_skewness(const std::vector<double>& sample);
double sample_excess_kurtosis(const std::vector<double>& sample);

}  // namespace flexseas
