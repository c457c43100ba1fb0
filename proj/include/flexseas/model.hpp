#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace flexseas {

/// Observed or simulated panel: n periods, d seasons per period, on the
/// implicit grid t_i = i/n (i = 1..n).
struct SeasonalPanel {
  Eigen::MatrixXd y;  // n x d

  /// Validates n >= 3, d >= 2 (DimensionError) and finiteness (DomainError).
  explicit SeasonalPanel(Eigen::MatrixXd values);

  int n() const { return static_cast<int>(y.rows()); }
  int d() const { return static_cast<int>(y.cols()); }

  /// Grid point of row i (0-based): (i + 1) / n.
  double t(int i) const { return static_cast<double>(i + 1) / n(); }
};

/// The constant d x d matrix mapping the reduced parameter vector
/// (alpha, beta_1..beta_{d-1}) to the d season means, together with its
/// inverse. Row j < d reads alpha + beta_{j+1}; the last row reads
/// alpha - sum of the betas, which encodes the sum-to-zero constraint.
struct DesignMatrix {
  int d = 0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd A_inv;

  static DesignMatrix build(int d);
};

/// One smooth curve on [0, 1], optionally with its second derivative for
/// bias computations.
struct Curve {
  std::function<double(double)> value;
  std::function<double(double)> second_derivative;  // may be empty

  bool has_second_derivative() const {
    return static_cast<bool>(second_derivative);
  }
};

/// Trend alpha plus the d seasonal effect curves, constrained to sum to
/// zero at every t.
class CurveSet {
 public:
  CurveSet(Curve alpha, std::vector<Curve> betas);

  int d() const { return static_cast<int>(betas_.size()); }
  double alpha(double t) const { return alpha_.value(t); }
  double beta(int j, double t) const { return betas_[j].value(t); }  // j 0-based

  /// (alpha(t), beta_1(t), .., beta_{d-1}(t)). No domain check; see
  /// curves_to_theta for the checked entry point.
  Eigen::VectorXd theta(double t) const;

  /// Second derivative of theta. Throws ConfigError when any required
  /// curve lacks one.
  Eigen::VectorXd theta_second(double t) const;

  bool has_second_derivatives() const;

  /// Verifies sum_j beta_j(t) = 0 on a uniform grid; throws ConstraintError
  /// when the worst violation exceeds tol.
  void check_constraint(double tol, int grid_points = 101) const;

 private:
  Curve alpha_;
  std::vector<Curve> betas_;
};

DesignMatrix build_design(int d);

/// theta(t) with the domain check t in [0, 1] (DomainError otherwise).
Eigen::VectorXd curves_to_theta(const CurveSet& curves, double t);

/// Tabulated curves on a grid: column 0 is alpha, columns 1..d are
/// beta_1..beta_d with beta_d = -(beta_1 + .. + beta_{d-1}).
struct TabulatedCurves {
  std::vector<double> ts;
  Eigen::MatrixXd values;  // ts.size() x (d + 1)
};

TabulatedCurves theta_to_curves(const std::vector<double>& ts,
                                const std::vector<Eigen::VectorXd>& thetas);

/// y_ij = alpha(t_i) + beta_j(t_i) + e_ij on t_i = i/n. The error matrix
/// fixes n and must be n x d; the curve constraint is rechecked at 1e-8
/// (ConstraintError).
SeasonalPanel synthesize_panel(const CurveSet& curves,
                               const Eigen::MatrixXd& errors);

// --- curve presets -------------------------------------------------------

/// Polynomial curves: coefficients in ascending order. `beta_coeffs` holds
/// the first d-1 seasonal curves; beta_d completes the sum-to-zero
/// constraint.
CurveSet make_polynomial_curves(
    const std::vector<double>& alpha_coeffs,
    const std::vector<std::vector<double>>& beta_coeffs);

/// Linear preset (degree <= 1 polynomial). Defaults: alpha = 2 + 3t,
/// beta_j = t - 0.5 for j < d.
CurveSet make_linear_curves(int d,
                            std::vector<double> alpha_coeffs = {2.0, 3.0},
                            std::vector<std::vector<double>> beta_coeffs = {});

/// Trigonometric preset: alpha = A cos(2 pi t), beta_j = A cos(2 pi t +
/// 2 pi j / d). The phases make the seasonal curves sum to zero identically.
CurveSet make_trig_curves(int d, double amplitude = 1.0);

}  // namespace flexseas
