#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace flexseas {

enum class ErrorVariant { Iid, VmaQ, Var1 };
enum class InnovationLaw { Gaussian, RademacherScaled };

/// A stationary weakly dependent d-variate error process with analytic
/// autocovariances. Three families:
///   iid    e_t = L z_t
///   vma_q  e_t = z~_t + Theta_1 z~_{t-1} + .. + Theta_q z~_{t-q}   (z~ = L z)
///   var_1  e_t = Phi e_{t-1} + L z_t,  spectral radius of Phi < 1
/// where L L' = sigma_eps and z_t has iid components drawn from the chosen
/// innovation law (unit variance either way, so cov(z~) = sigma_eps). The
/// rademacher-scaled law covers the classical weakly-dependent-but-not-mixing
/// AR example.
struct ErrorProcessSpec {
  ErrorVariant variant = ErrorVariant::Iid;
  int d = 1;
  Eigen::MatrixXd sigma_eps;          // d x d SPD innovation covariance
  std::vector<Eigen::MatrixXd> theta; // vma_q coefficient matrices, size q
  Eigen::MatrixXd phi;                // var_1 transition matrix
  InnovationLaw law = InnovationLaw::Gaussian;

  /// Throws SpecError when any structural invariant fails (sigma_eps not
  /// SPD, spectral radius of phi >= 1 - 1e-6, shape mismatches).
  void validate() const;

  int q() const { return static_cast<int>(theta.size()); }
};

/// Draws e_1..e_n from the stationary law, deterministically in seed.
/// vma_q starts from q presample innovations; var_1 starts from an exact
/// N(0, R(0)) draw under the gaussian law and from a burn-in of
/// max(200, ceil(50 / -log rho(Phi))) steps under the rademacher law.
Eigen::MatrixXd simulate(const ErrorProcessSpec& spec, int n,
                         std::uint64_t seed);

/// Same as simulate but fills a caller-owned buffer (resized to n x d).
void simulate_into(const ErrorProcessSpec& spec, int n, std::uint64_t seed,
                   Eigen::MatrixXd& out);

/// Analytic autocovariance R(k) = cov(e_t, e_{t+k})'. Negative lags return
/// R(-k) = R(k)'.
Eigen::MatrixXd autocov(const ErrorProcessSpec& spec, int k);

/// Long-run covariance Sigma_0 = R(0) + 2 sum_{k>=1} R(k), truncated with
/// an analytic geometric tail bound below tol and symmetrized.
Eigen::MatrixXd longrun_sigma0(const ErrorProcessSpec& spec,
                               double tol = 1e-12);

/// (n-k)^-1 sum_i e_i e_{i+k}' with no mean subtraction (the simulated
/// processes are mean-zero by construction). Throws DimensionError for
/// k >= n.
Eigen::MatrixXd empirical_autocov(const Eigen::MatrixXd& sample, int k);

/// Monotone nonincreasing upper bound on the dependence coefficient of the
/// process, dominating ||R(r)||_max at every lag. iid: 0 beyond lag 0;
/// vma_q: suffix max of ||R(s)||_max, exactly 0 for r > q; var_1: C rho^r
/// with rho the spectral radius and C an explicit eigenbasis-conditioning
/// constant.
struct DependenceBound {
  enum class Kind { Kappa, Lambda };
  Kind kind = Kind::Kappa;
  bool summable = true;

  double at(int r) const;

  // internals
  ErrorVariant variant = ErrorVariant::Iid;
  double r0_norm = 0.0;          // ||R(0)||_max
  double rho = 0.0;              // var_1 decay rate
  double constant = 0.0;         // var_1 prefactor
  std::vector<double> suffix_max;  // vma_q tail maxima, indices 0..q
};

DependenceBound dependence_bound(const ErrorProcessSpec& spec);

/// Convenience: dependence_bound(spec).at(r).
double dependence_bound(const ErrorProcessSpec& spec, int r);

}  // namespace flexseas
