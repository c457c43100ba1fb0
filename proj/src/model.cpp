#include "flexseas/model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "flexseas/errors.hpp"

namespace flexseas {

SeasonalPanel::SeasonalPanel(Eigen::MatrixXd values) : y(std::move(values)) {
  if (y.rows() < 3) {
    throw DimensionError("panel needs at least 3 periods, got n=" +
                         std::to_string(y.rows()));
  }
  if (y.cols() < 2) {
    throw DimensionError("panel needs at least 2 seasons, got d=" +
                         std::to_string(y.cols()));
  }
  if (!y.allFinite()) {
    throw DomainError("panel contains non-finite entries");
  }
}

DesignMatrix DesignMatrix::build(int d) {
  if (d < 2) {
    throw DimensionError("design matrix needs d >= 2 seasons, got d=" +
                         std::to_string(d));
  }
  DesignMatrix out;
  out.d = d;
  out.A = Eigen::MatrixXd::Zero(d, d);
  out.A.col(0).setOnes();
  for (int j = 0; j + 1 < d; ++j) {
    out.A(j, j + 1) = 1.0;
    out.A(d - 1, j + 1) = -1.0;
  }
  // Season means m satisfy sum(m) = d * alpha, so the inverse is explicit:
  // alpha averages the seasons and each beta_j is m_j minus that average.
  out.A_inv = Eigen::MatrixXd::Constant(d, d, -1.0 / d);
  out.A_inv.row(0).setConstant(1.0 / d);
  for (int i = 1; i < d; ++i) out.A_inv(i, i - 1) += 1.0;
  return out;
}

DesignMatrix build_design(int d) { return DesignMatrix::build(d); }

CurveSet::CurveSet(Curve alpha, std::vector<Curve> betas)
    : alpha_(std::move(alpha)), betas_(std::move(betas)) {
  if (betas_.size() < 2) {
    throw DimensionError("a curve set needs at least 2 seasonal curves, got " +
                         std::to_string(betas_.size()));
  }
  if (!alpha_.value) throw ConfigError("trend curve has no value function");
  for (std::size_t j = 0; j < betas_.size(); ++j) {
    if (!betas_[j].value) {
      throw ConfigError("seasonal curve " + std::to_string(j + 1) +
                        " has no value function");
    }
  }
}

Eigen::VectorXd CurveSet::theta(double t) const {
  Eigen::VectorXd out(d());
  out(0) = alpha_.value(t);
  for (int j = 0; j + 1 < d(); ++j) out(j + 1) = betas_[j].value(t);
  return out;
}

Eigen::VectorXd CurveSet::theta_second(double t) const {
  if (!has_second_derivatives()) {
    throw ConfigError(
        "curve set carries no second derivatives; use an analytic preset");
  }
  Eigen::VectorXd out(d());
  out(0) = alpha_.second_derivative(t);
  for (int j = 0; j + 1 < d(); ++j) {
    out(j + 1) = betas_[j].second_derivative(t);
  }
  return out;
}

bool CurveSet::has_second_derivatives() const {
  if (!alpha_.has_second_derivative()) return false;
  for (int j = 0; j + 1 < d(); ++j) {
    if (!betas_[j].has_second_derivative()) return false;
  }
  return true;
}

void CurveSet::check_constraint(double tol, int grid_points) const {
  double worst = 0.0;
  double worst_t = 0.0;
  for (int g = 0; g < grid_points; ++g) {
    const double t = static_cast<double>(g) / (grid_points - 1);
    double sum = 0.0;
    for (const auto& b : betas_) sum += b.value(t);
    if (std::abs(sum) > worst) {
      worst = std::abs(sum);
      worst_t = t;
    }
  }
  if (worst > tol) {
    throw ConstraintError("seasonal curves sum to " + std::to_string(worst) +
                          " at t=" + std::to_string(worst_t) +
                          " (must be 0 within " + std::to_string(tol) + ")");
  }
}

Eigen::VectorXd curves_to_theta(const CurveSet& curves, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("t=" + std::to_string(t) + " outside [0, 1]");
  }
  return curves.theta(t);
}

TabulatedCurves theta_to_curves(const std::vector<double>& ts,
                                const std::vector<Eigen::VectorXd>& thetas) {
  if (ts.size() != thetas.size()) {
    throw DimensionError("grid has " + std::to_string(ts.size()) +
                         " points but " + std::to_string(thetas.size()) +
                         " theta vectors");
  }
  TabulatedCurves out;
  out.ts = ts;
  if (thetas.empty()) {
    out.values.resize(0, 0);
    return out;
  }
  const int d = static_cast<int>(thetas.front().size());
  if (d < 2) {
    throw DimensionError("theta vectors must have length >= 2, got " +
                         std::to_string(d));
  }
  out.values.resize(static_cast<int>(ts.size()), d + 1);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (thetas[i].size() != d) {
      throw DimensionError("theta vector " + std::to_string(i) +
                           " has length " + std::to_string(thetas[i].size()) +
                           ", expected " + std::to_string(d));
    }
    const int row = static_cast<int>(i);
    out.values(row, 0) = thetas[i](0);
    double beta_sum = 0.0;
    for (int j = 1; j < d; ++j) {
      out.values(row, j) = thetas[i](j);
      beta_sum += thetas[i](j);
    }
    out.values(row, d) = -beta_sum;  // the constraint completes beta_d
  }
  return out;
}

SeasonalPanel synthesize_panel(const CurveSet& curves,
                               const Eigen::MatrixXd& errors) {
  const int n = static_cast<int>(errors.rows());
  const int d = static_cast<int>(errors.cols());
  if (d != curves.d()) {
    throw DimensionError("error matrix has " + std::to_string(d) +
                         " seasons but the curve set has " +
                         std::to_string(curves.d()));
  }
  curves.check_constraint(1e-8);
  Eigen::MatrixXd y(n, d);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) / n;
    const double a = curves.alpha(t);
    for (int j = 0; j < d; ++j) y(i, j) = a + curves.beta(j, t) + errors(i, j);
  }
  return SeasonalPanel(std::move(y));
}

namespace {

// Polynomial in ascending coefficient order with its exact second derivative.
Curve make_poly(std::vector<double> coeffs) {
  std::vector<double> dd;  // coefficients of the second derivative
  for (std::size_t k = 2; k < coeffs.size(); ++k) {
    dd.push_back(coeffs[k] * static_cast<double>(k) *
                 static_cast<double>(k - 1));
  }
  const auto horner = [](const std::vector<double>& c, double t) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
    return v;
  };
  Curve curve;
  curve.value = [coeffs = std::move(coeffs), horner](double t) {
    return horner(coeffs, t);
  };
  curve.second_derivative = [dd = std::move(dd), horner](double t) {
    return horner(dd, t);
  };
  return curve;
}

}  // namespace

CurveSet make_polynomial_curves(
    const std::vector<double>& alpha_coeffs,
    const std::vector<std::vector<double>>& beta_coeffs) {
  if (beta_coeffs.empty()) {
    throw DimensionError(
        "polynomial curves need at least one seasonal coefficient list "
        "(beta_d is completed from the constraint)");
  }
  std::vector<Curve> betas;
  betas.reserve(beta_coeffs.size() + 1);
  std::size_t max_len = 0;
  for (const auto& c : beta_coeffs) max_len = std::max(max_len, c.size());
  std::vector<double> completion(max_len, 0.0);
  for (const auto& c : beta_coeffs) {
    betas.push_back(make_poly(c));
    for (std::size_t k = 0; k < c.size(); ++k) completion[k] -= c[k];
  }
  betas.push_back(make_poly(completion));
  return CurveSet(make_poly(alpha_coeffs), std::move(betas));
}

CurveSet make_linear_curves(int d, std::vector<double> alpha_coeffs,
                            std::vector<std::vector<double>> beta_coeffs) {
  if (d < 2) {
    throw DimensionError("linear curves need d >= 2, got d=" +
                         std::to_string(d));
  }
  if (alpha_coeffs.size() > 2) {
    throw ConfigError("linear trend takes at most 2 coefficients, got " +
                      std::to_string(alpha_coeffs.size()));
  }
  if (beta_coeffs.empty()) {
    beta_coeffs.assign(static_cast<std::size_t>(d - 1), {-0.5, 1.0});
  }
  if (beta_coeffs.size() != static_cast<std::size_t>(d - 1)) {
    throw DimensionError("expected " + std::to_string(d - 1) +
                         " seasonal coefficient lists, got " +
                         std::to_string(beta_coeffs.size()));
  }
  for (const auto& c : beta_coeffs) {
    if (c.size() > 2) {
      throw ConfigError("linear seasonal curves take at most 2 coefficients");
    }
  }
  return make_polynomial_curves(alpha_coeffs, beta_coeffs);
}

CurveSet make_trig_curves(int d, double amplitude) {
  if (d < 2) {
    throw DimensionError("trig curves need d >= 2, got d=" +
                         std::to_string(d));
  }
  const double two_pi = 2.0 * M_PI;
  const auto cosine = [two_pi](double amplitude_, double phase) {
    Curve c;
    c.value = [=](double t) {
      return amplitude_ * std::cos(two_pi * t + phase);
    };
    c.second_derivative = [=](double t) {
      return -amplitude_ * two_pi * two_pi * std::cos(two_pi * t + phase);
    };
    return c;
  };
  // Phases 2 pi j / d are equally spaced around the circle, so the d
  // seasonal curves sum to zero at every t.
  std::vector<Curve> betas;
  betas.reserve(static_cast<std::size_t>(d));
  for (int j = 1; j <= d; ++j) {
    betas.push_back(cosine(amplitude, two_pi * j / d));
  }
  return CurveSet(cosine(amplitude, 0.0), std::move(betas));
}

}  // namespace flexseas
