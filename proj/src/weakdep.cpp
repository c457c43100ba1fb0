#include "flexseas/weakdep.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "flexseas/errors.hpp"
#include "flexseas/rng.hpp"

namespace flexseas {

namespace {

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& m,
                                const std::string& what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SpecError(what + " is not positive definite");
  }
  return llt.matrixL();
}

// Stationary covariance R(0) of e_t = Phi e_{t-1} + w_t, cov(w) = Sigma:
// R(0) = sum_k Phi^k Sigma Phi'^k, summed by repeated doubling
// (S <- S + P S P', P <- P P), which converges geometrically fast.
Eigen::MatrixXd var1_stationary_cov(const Eigen::MatrixXd& phi,
                                    const Eigen::MatrixXd& sigma) {
  Eigen::MatrixXd s = sigma;
  Eigen::MatrixXd p = phi;
  for (int it = 0; it < 200; ++it) {
    const Eigen::MatrixXd inc = p * s * p.transpose();
    const double scale = max_abs(s);
    s += inc;
    p = p * p;
    if (max_abs(inc) <= 1e-16 * scale) break;
  }
  return 0.5 * (s + s.transpose());
}

void draw_innovation(Rng& rng, InnovationLaw law, Eigen::VectorXd& z) {
  if (law == InnovationLaw::Gaussian) {
    for (int j = 0; j < z.size(); ++j) z(j) = rng.gaussian();
  } else {
    for (int j = 0; j < z.size(); ++j) z(j) = rng.rademacher();
  }
}

}  // namespace

void ErrorProcessSpec::validate() const {
  if (d < 1) {
    throw SpecError("error process needs d >= 1 seasons, got d=" +
                    std::to_string(d));
  }
  if (sigma_eps.rows() != d || sigma_eps.cols() != d) {
    throw SpecError("sigma_eps must be " + std::to_string(d) + "x" +
                    std::to_string(d));
  }
  const double scale = std::max(1.0, max_abs(sigma_eps));
  if (max_abs(sigma_eps - sigma_eps.transpose()) > 1e-10 * scale) {
    throw SpecError("sigma_eps must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_eps);
  if (es.eigenvalues().minCoeff() <= 1e-10) {
    throw SpecError("sigma_eps must be positive definite (smallest eigenvalue " +
                    std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  switch (variant) {
    case ErrorVariant::Iid:
      if (!theta.empty()) throw SpecError("iid spec must not carry theta");
      if (phi.size() != 0) throw SpecError("iid spec must not carry phi");
      break;
    case ErrorVariant::VmaQ:
      if (theta.empty()) {
        throw SpecError("vma_q needs at least one coefficient matrix");
      }
      for (std::size_t s = 0; s < theta.size(); ++s) {
        if (theta[s].rows() != d || theta[s].cols() != d) {
          throw SpecError("theta[" + std::to_string(s + 1) + "] must be " +
                          std::to_string(d) + "x" + std::to_string(d));
        }
      }
      if (phi.size() != 0) throw SpecError("vma_q spec must not carry phi");
      break;
    case ErrorVariant::Var1: {
      if (phi.rows() != d || phi.cols() != d) {
        throw SpecError("phi must be " + std::to_string(d) + "x" +
                        std::to_string(d));
      }
      if (!theta.empty()) throw SpecError("var_1 spec must not carry theta");
      const double rho = spectral_radius(phi);
      if (!(rho < 1.0 - 1e-6)) {
        throw SpecError("phi spectral radius " + std::to_string(rho) +
                        " must be < 1 (margin 1e-6)");
      }
      break;
    }
  }
}

void simulate_into(const ErrorProcessSpec& spec, int n, std::uint64_t seed,
                   Eigen::MatrixXd& out) {
  spec.validate();
  if (n < 1) {
    throw DimensionError("simulate needs n >= 1 draws, got n=" +
                         std::to_string(n));
  }
  const int d = spec.d;
  out.resize(n, d);
  Rng rng(seed);
  const Eigen::MatrixXd chol = cholesky_factor(spec.sigma_eps, "sigma_eps");
  Eigen::VectorXd z(d);

  // Draw order is time-major, component-minor; this layout is part of the
  // seed-reproducibility contract.
  switch (spec.variant) {
    case ErrorVariant::Iid: {
      for (int i = 0; i < n; ++i) {
        draw_innovation(rng, spec.law, z);
        out.row(i) = (chol * z).transpose();
      }
      break;
    }
    case ErrorVariant::VmaQ: {
      const int q = spec.q();
      // Ring buffer of the last q+1 innovations w_t = chol * z_t, seeded
      // with q presample draws so e_1 already follows the stationary law.
      std::vector<Eigen::VectorXd> wbuf(static_cast<std::size_t>(q) + 1);
      Eigen::VectorXd e(d);
      for (int time = 1 - q; time <= n; ++time) {
        draw_innovation(rng, spec.law, z);
        auto& w = wbuf[static_cast<std::size_t>((time - (1 - q)) % (q + 1))];
        w = chol * z;
        if (time < 1) continue;
        e = w;
        for (int s = 1; s <= q; ++s) {
          const auto& lagged =
              wbuf[static_cast<std::size_t>((time - s - (1 - q)) % (q + 1))];
          e.noalias() += spec.theta[static_cast<std::size_t>(s - 1)] * lagged;
        }
        out.row(time - 1) = e.transpose();
      }
      break;
    }
    case ErrorVariant::Var1: {
      Eigen::VectorXd e(d);
      if (spec.law == InnovationLaw::Gaussian) {
        // Exact stationary start: e_0 ~ N(0, R(0)).
        const Eigen::MatrixXd r0 =
            var1_stationary_cov(spec.phi, spec.sigma_eps);
        const Eigen::MatrixXd chol0 = cholesky_factor(r0, "stationary R(0)");
        draw_innovation(rng, spec.law, z);
        e = chol0 * z;
      } else {
        // No exact non-Gaussian stationary draw is available; burn in
        // long enough that the geometric memory is below noise.
        const double rho = spectral_radius(spec.phi);
        int burn = 200;
        if (rho > 0.0) {
          burn = std::max(
              200, static_cast<int>(std::ceil(50.0 / -std::log(rho))));
        }
        e.setZero();
        for (int b = 0; b < burn; ++b) {
          draw_innovation(rng, spec.law, z);
          e = spec.phi * e + chol * z;
        }
      }
      for (int i = 0; i < n; ++i) {
        draw_innovation(rng, spec.law, z);
        e = spec.phi * e + chol * z;
        out.row(i) = e.transpose();
      }
      break;
    }
  }
}

Eigen::MatrixXd simulate(const ErrorProcessSpec& spec, int n,
                         std::uint64_t seed) {
  Eigen::MatrixXd out;
  simulate_into(spec, n, seed, out);
  return out;
}

Eigen::MatrixXd autocov(const ErrorProcessSpec& spec, int k) {
  spec.validate();
  if (k < 0) return autocov(spec, -k).transpose();
  switch (spec.variant) {
    case ErrorVariant::Iid:
      return k == 0 ? spec.sigma_eps
                    : Eigen::MatrixXd::Zero(spec.d, spec.d);
    case ErrorVariant::VmaQ: {
      // R(k) = sum_s Theta_{s+k} Sigma_eps Theta_s' with Theta_0 = I,
      // identically zero beyond lag q.
      const int q = spec.q();
      if (k > q) return Eigen::MatrixXd::Zero(spec.d, spec.d);
      const auto coeff = [&](int s) -> Eigen::MatrixXd {
        if (s == 0) return Eigen::MatrixXd::Identity(spec.d, spec.d);
        return spec.theta[static_cast<std::size_t>(s - 1)];
      };
      Eigen::MatrixXd r = Eigen::MatrixXd::Zero(spec.d, spec.d);
      for (int s = 0; s + k <= q; ++s) {
        r.noalias() += coeff(s + k) * spec.sigma_eps * coeff(s).transpose();
      }
      return r;
    }
    case ErrorVariant::Var1: {
      const Eigen::MatrixXd r0 = var1_stationary_cov(spec.phi, spec.sigma_eps);
      Eigen::MatrixXd r = r0;
      for (int s = 0; s < k; ++s) r = spec.phi * r;
      return r;
    }
  }
  throw SpecError("unknown error process variant");
}

Eigen::MatrixXd longrun_sigma0(const ErrorProcessSpec& spec, double tol) {
  spec.validate();
  const DependenceBound bound = dependence_bound(spec);
  if (!bound.summable) {
    throw SummabilityError("dependence coefficients are not summable");
  }
  Eigen::MatrixXd sigma = autocov(spec, 0);
  switch (spec.variant) {
    case ErrorVariant::Iid:
      break;
    case ErrorVariant::VmaQ:
      for (int k = 1; k <= spec.q(); ++k) sigma += 2.0 * autocov(spec, k);
      break;
    case ErrorVariant::Var1: {
      const double rho = spectral_radius(spec.phi);
      const double r0_norm = max_abs(sigma);
      Eigen::MatrixXd term = sigma;  // Phi^k R(0) as k advances
      long k = 0;
      while (true) {
        ++k;
        term = spec.phi * term;
        sigma += 2.0 * term;
        // Analytic geometric tail after lag k, plus the actual term size
        // as a guard for non-normal Phi whose transient exceeds rho^k.
        const double tail = 2.0 * r0_norm * std::pow(rho, k + 1) / (1.0 - rho);
        if (tail < tol && max_abs(term) < tol) break;
        if (k > 10'000'000) {
          throw SummabilityError(
              "long-run covariance truncation did not converge");
        }
      }
      break;
    }
  }
  return 0.5 * (sigma + sigma.transpose());
}

Eigen::MatrixXd empirical_autocov(const Eigen::MatrixXd& sample, int k) {
  const int n = static_cast<int>(sample.rows());
  if (k < 0) {
    throw DimensionError("empirical_autocov needs lag k >= 0, got k=" +
                         std::to_string(k));
  }
  if (k >= n) {
    throw DimensionError("lag k=" + std::to_string(k) +
                         " needs more than k observations, got n=" +
                         std::to_string(n));
  }
  const int m = n - k;
  return (sample.topRows(m).transpose() * sample.bottomRows(m)) /
         static_cast<double>(m);
}

double DependenceBound::at(int r) const {
  if (r < 0) {
    throw DomainError("dependence bound needs lag r >= 0, got r=" +
                      std::to_string(r));
  }
  switch (variant) {
    case ErrorVariant::Iid:
      return r == 0 ? r0_norm : 0.0;
    case ErrorVariant::VmaQ:
      return r < static_cast<int>(suffix_max.size()) ? suffix_max[r] : 0.0;
    case ErrorVariant::Var1:
      return constant * std::pow(rho, r);
  }
  return 0.0;
}

DependenceBound dependence_bound(const ErrorProcessSpec& spec) {
  spec.validate();
  DependenceBound b;
  b.kind = DependenceBound::Kind::Kappa;
  b.summable = true;
  b.variant = spec.variant;
  b.r0_norm = max_abs(autocov(spec, 0));
  switch (spec.variant) {
    case ErrorVariant::Iid:
      break;
    case ErrorVariant::VmaQ: {
      // Suffix maxima of ||R(s)||_max make the bound monotone while still
      // touching every autocovariance it must dominate.
      const int q = spec.q();
      b.suffix_max.assign(static_cast<std::size_t>(q) + 1, 0.0);
      double running = 0.0;
      for (int s = q; s >= 0; --s) {
        running = std::max(running, max_abs(autocov(spec, s)));
        b.suffix_max[static_cast<std::size_t>(s)] = running;
      }
      break;
    }
    case ErrorVariant::Var1: {
      const Eigen::MatrixXd r0 = var1_stationary_cov(spec.phi, spec.sigma_eps);
      const double r0_2norm = r0.operatorNorm();
      Eigen::EigenSolver<Eigen::MatrixXd> es(spec.phi);
      b.rho = es.eigenvalues().cwiseAbs().maxCoeff();
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
      const double smin = svd.singularValues().minCoeff();
      const double smax = svd.singularValues().maxCoeff();
      if (smin > 1e-10 * smax) {
        // Diagonalizable: ||Phi^r|| <= cond(V) rho^r.
        b.constant = (smax / smin) * r0_2norm;
      } else {
        // Numerically defective Phi: back off the rate and take the
        // verified prefactor sup_r ||Phi^r|| / rho_eff^r (finite because
        // rho_eff exceeds the spectral radius).
        b.rho = 0.5 * (1.0 + b.rho);
        double prefactor = 1.0;
        Eigen::MatrixXd p = Eigen::MatrixXd::Identity(spec.d, spec.d);
        double rate_r = 1.0;
        for (int r = 0; r < 100000; ++r) {
          const double ratio = p.operatorNorm() / rate_r;
          prefactor = std::max(prefactor, ratio);
          if (ratio < 1.0 && r > 0) break;
          p = p * spec.phi;
          rate_r *= b.rho;
        }
        b.constant = prefactor * r0_2norm;
      }
      break;
    }
  }
  return b;
}

double dependence_bound(const ErrorProcessSpec& spec, int r) {
  return dependence_bound(spec).at(r);
}

}  // namespace flexseas
