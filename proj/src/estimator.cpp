#include "flexseas/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flexseas/errors.hpp"
#include "flexseas/numeric.hpp"

namespace flexseas {

namespace {

void check_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("fit point t=" + std::to_string(t) + " outside [0, 1]");
  }
}

void check_cfg(const FitConfig& cfg) {
  if (!(cfg.h > 0.0 && cfg.h <= 1.0)) {
    throw BandwidthError("bandwidth must satisfy 0 < h <= 1, got h=" +
                         std::to_string(cfg.h));
  }
  if (!(cfg.min_denominator > 0.0)) {
    throw ConfigError("min_denominator must be positive, got " +
                      std::to_string(cfg.min_denominator));
  }
}

struct Window {
  int lo = 0;   // first 0-based row index with possibly nonzero weight
  int hi = -1;  // last such index (inclusive); hi < lo means empty
};

// Rows whose grid point t_i = (i+1)/n can fall inside the kernel support
// [t - h*s, t + h*s]. Padded by one index on each side so floating-point
// boundary cases land on an exact K = 0 evaluation instead of being skipped.
Window support_window(int n, const FitConfig& cfg, double t) {
  const double reach = cfg.h * cfg.kernel.support_halfwidth;
  Window w;
  w.lo = std::max(0, static_cast<int>(std::floor(n * (t - reach))) - 1);
  w.hi = std::min(n - 1, static_cast<int>(std::ceil(n * (t + reach))));
  return w;
}

// One pass over the window: S_n0..S_n3 plus, when a panel is supplied,
// T_n0 and T_n1. Fixed ascending-index order and compensated accumulation
// keep results identical no matter how callers are scheduled.
struct MomentPass {
  std::array<double, 4> s{};
  Eigen::VectorXd t0, t1;
  int support_points = 0;

  MomentPass(const SeasonalPanel* panel, int n, const FitConfig& cfg,
             double t) {
    const int d = panel ? panel->d() : 0;
    std::array<KahanSum, 4> s_acc;
    std::vector<KahanSum> t0_acc(d), t1_acc(d);
    const Window w = support_window(n, cfg, t);
    for (int i = w.lo; i <= w.hi; ++i) {
      const double u = static_cast<double>(i + 1) / n - t;
      const double kv = eval_scaled(cfg.kernel, cfg.h, u);
      if (kv == 0.0) continue;
      ++support_points;
      double uk = kv;
      for (int k = 0; k < 4; ++k) {
        s_acc[k].add(uk);
        uk *= u;
      }
      if (panel) {
        for (int j = 0; j < d; ++j) {
          const double yk = panel->y(i, j) * kv;
          t0_acc[j].add(yk);
          t1_acc[j].add(yk * u);
        }
      }
    }
    for (int k = 0; k < 4; ++k) s[k] = s_acc[k].value() / n;
    if (panel) {
      t0.resize(d);
      t1.resize(d);
      for (int j = 0; j < d; ++j) {
        t0(j) = t0_acc[j].value() / n;
        t1(j) = t1_acc[j].value() / n;
      }
    }
  }

  double denominator() const { return s[0] * s[2] - s[1] * s[1]; }
};

}  // namespace

double s_moment(const SeasonalPanel& panel, const FitConfig& cfg, double t,
                int k) {
  check_cfg(cfg);
  if (k < 0 || k > 3) {
    throw DomainError("s_moment is defined for k in 0..3, got k=" +
                      std::to_string(k));
  }
  return MomentPass(nullptr, panel.n(), cfg, t).s[static_cast<std::size_t>(k)];
}

Eigen::VectorXd t_moment(const SeasonalPanel& panel, const FitConfig& cfg,
                         double t, int k) {
  check_cfg(cfg);
  if (k != 0 && k != 1) {
    throw DomainError("t_moment is defined for k in {0, 1}, got k=" +
                      std::to_string(k));
  }
  MomentPass pass(&panel, panel.n(), cfg, t);
  return k == 0 ? pass.t0 : pass.t1;
}

Eigen::VectorXd weights_for_grid(int n, const FitConfig& cfg, double t) {
  check_cfg(cfg);
  if (n < 3) {
    throw DimensionError("weights need n >= 3 grid points, got n=" +
                         std::to_string(n));
  }
  MomentPass pass(nullptr, n, cfg, t);
  const double den = pass.denominator();
  if (!(den > cfg.min_denominator)) {
    throw DegenerateWindow(
        "S_n0*S_n2 - S_n1^2 = " + std::to_string(den) + " at t=" +
        std::to_string(t) +
        " is below the floor; the bandwidth is too small for this grid");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  const Window win = support_window(n, cfg, t);
  for (int i = win.lo; i <= win.hi; ++i) {
    const double u = static_cast<double>(i + 1) / n - t;
    const double kv = eval_scaled(cfg.kernel, cfg.h, u);
    if (kv == 0.0) continue;
    w(i) = (pass.s[2] - pass.s[1] * u) * kv / (n * den);
  }
  return w;
}

Eigen::VectorXd weights(const SeasonalPanel& panel, const FitConfig& cfg,
                        double t) {
  return weights_for_grid(panel.n(), cfg, t);
}

FitResult fit_at(const SeasonalPanel& panel, const FitConfig& cfg, double t) {
  check_cfg(cfg);
  check_t(t);
  MomentPass pass(&panel, panel.n(), cfg, t);
  const double den = pass.denominator();
  if (pass.support_points < 3) {
    throw DegenerateWindow(
        "kernel window at t=" + std::to_string(t) + " holds only " +
        std::to_string(pass.support_points) +
        " grid points (need >= 3); increase h or n");
  }
  if (!(den > cfg.min_denominator)) {
    throw DegenerateWindow(
        "S_n0*S_n2 - S_n1^2 = " + std::to_string(den) + " at t=" +
        std::to_string(t) +
        " is below the floor; the bandwidth is too small for this grid");
  }
  const DesignMatrix design = DesignMatrix::build(panel.d());
  FitResult out;
  out.t = t;
  out.s_moments = pass.s;
  out.denominator = den;
  out.theta_hat = design.A_inv * ((pass.s[2] * pass.t0 - pass.s[1] * pass.t1) / den);
  out.theta_prime_hat =
      design.A_inv * ((pass.s[0] * pass.t1 - pass.s[1] * pass.t0) / den);
  if (!out.theta_hat.allFinite() || !out.theta_prime_hat.allFinite()) {
    throw DegenerateWindow("fit at t=" + std::to_string(t) +
                           " produced non-finite estimates");
  }
  return out;
}

std::vector<FitResult> fit_grid(const SeasonalPanel& panel,
                                const FitConfig& cfg,
                                const std::vector<double>& grid) {
  std::vector<FitResult> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(fit_at(panel, cfg, t));
  return out;
}

Eigen::VectorXd theoretical_bias(const CurveSet& curves, const FitConfig& cfg,
                                 double t) {
  check_cfg(cfg);
  check_t(t);
  const double mu2 = moment(cfg.kernel, 2);
  return (0.5 * cfg.h * cfg.h * mu2) * curves.theta_second(t);
}

}  // namespace flexseas
