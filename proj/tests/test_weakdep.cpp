#include <cmath>
#include <vector>

#include "doctest.h"
#include "flexseas/errors.hpp"
#include "flexseas/weakdep.hpp"
#include "support/oracles.hpp"

using flexseas::ErrorProcessSpec;
using flexseas::ErrorVariant;
using flexseas::InnovationLaw;

namespace {

ErrorProcessSpec iid_spec(const Eigen::MatrixXd& sigma) {
  ErrorProcessSpec spec;
  spec.variant = ErrorVariant::Iid;
  spec.d = static_cast<int>(sigma.rows());
  spec.sigma_eps = sigma;
  return spec;
}

ErrorProcessSpec ar1_scalar(double phi, double sigma2 = 1.0) {
  ErrorProcessSpec spec;
  spec.variant = ErrorVariant::Var1;
  spec.d = 1;
  spec.sigma_eps = Eigen::MatrixXd::Constant(1, 1, sigma2);
  spec.phi = Eigen::MatrixXd::Constant(1, 1, phi);
  return spec;
}

ErrorProcessSpec ma1_scalar(double theta) {
  ErrorProcessSpec spec;
  spec.variant = ErrorVariant::VmaQ;
  spec.d = 1;
  spec.sigma_eps = Eigen::MatrixXd::Identity(1, 1);
  spec.theta = {Eigen::MatrixXd::Constant(1, 1, theta)};
  return spec;
}

}  // namespace

TEST_CASE("spec validation catches structural mistakes") {
  ErrorProcessSpec spec = iid_spec(Eigen::MatrixXd::Identity(2, 2));
  CHECK_NOTHROW(spec.validate());

  // Not symmetric.
  spec.sigma_eps(0, 1) = 0.3;
  CHECK_THROWS_AS(spec.validate(), flexseas::SpecError);

  // Not positive definite.
  spec.sigma_eps << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(spec.validate(), flexseas::SpecError);

  // Unstable VAR.
  ErrorProcessSpec var = ar1_scalar(1.0);
  CHECK_THROWS_AS(var.validate(), flexseas::SpecError);
  var.phi(0, 0) = 0.999999;  // inside the 1 - 1e-6 guard band
  CHECK_THROWS_AS(var.validate(), flexseas::SpecError);
  var.phi(0, 0) = 0.95;
  CHECK_NOTHROW(var.validate());

  // Parameters that do not belong to the variant.
  ErrorProcessSpec mixed = iid_spec(Eigen::MatrixXd::Identity(2, 2));
  mixed.phi = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(mixed.validate(), flexseas::SpecError);

  // Shape mismatch in a VMA coefficient.
  ErrorProcessSpec vma = ma1_scalar(0.8);
  vma.theta.push_back(Eigen::MatrixXd::Zero(2, 2));
  CHECK_THROWS_AS(vma.validate(), flexseas::SpecError);
}

TEST_CASE("scalar AR(1) closed forms, phi=0.5 sigma2=1") {
  const ErrorProcessSpec spec = ar1_scalar(0.5);
  CHECK(flexseas::autocov(spec, 0)(0, 0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(flexseas::autocov(spec, 1)(0, 0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(flexseas::autocov(spec, 2)(0, 0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(flexseas::autocov(spec, -1)(0, 0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // Long-run variance sigma2 / (1 - phi)^2 = 4.
  CHECK(flexseas::longrun_sigma0(spec)(0, 0) ==
        doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("scalar MA(1) closed forms, theta=0.8") {
  const ErrorProcessSpec spec = ma1_scalar(0.8);
  CHECK(flexseas::autocov(spec, 0)(0, 0) ==
        doctest::Approx(1.64).epsilon(1e-14));
  CHECK(flexseas::autocov(spec, 1)(0, 0) ==
        doctest::Approx(0.8).epsilon(1e-14));
  CHECK(flexseas::autocov(spec, 2)(0, 0) == 0.0);
  CHECK(flexseas::autocov(spec, 9)(0, 0) == 0.0);
  // Long-run variance (1 + theta)^2 = 3.24.
  CHECK(flexseas::longrun_sigma0(spec)(0, 0) ==
        doctest::Approx(3.24).epsilon(1e-12));
}

TEST_CASE("iid autocovariance is the innovation covariance at lag 0 only") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.5;
  const ErrorProcessSpec spec = iid_spec(sigma);
  CHECK((flexseas::autocov(spec, 0) - sigma).cwiseAbs().maxCoeff() == 0.0);
  CHECK(flexseas::autocov(spec, 1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((flexseas::longrun_sigma0(spec) - sigma).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("VAR(1) stationary covariance matches a Lyapunov oracle") {
  Eigen::MatrixXd phi(3, 3);
  phi << 0.4, 0.15, 0.0, -0.1, 0.3, 0.2, 0.05, 0.0, 0.25;
  Eigen::MatrixXd sigma(3, 3);
  sigma << 1.0, 0.2, 0.1, 0.2, 0.8, 0.0, 0.1, 0.0, 1.3;
  ErrorProcessSpec spec;
  spec.variant = ErrorVariant::Var1;
  spec.d = 3;
  spec.sigma_eps = sigma;
  spec.phi = phi;
  spec.validate();

  const Eigen::MatrixXd r0 = flexseas::autocov(spec, 0);
  const Eigen::MatrixXd ref = oracles::lyapunov_r0(phi, sigma);
  CHECK((r0 - ref).cwiseAbs().maxCoeff() <= 1e-10);
  // R(k) = Phi^k R(0).
  CHECK((flexseas::autocov(spec, 2) - phi * phi * ref).cwiseAbs().maxCoeff() <=
        1e-10);
  // Long-run covariance against the geometric-series closed form,
  // R0 + sum_k Phi^k R0 + (Phi^k R0)' = R0 + F R0 + (F R0)' with
  // F = (I - Phi)^{-1} Phi.
  const Eigen::MatrixXd f =
      (Eigen::MatrixXd::Identity(3, 3) - phi).fullPivLu().solve(phi);
  const Eigen::MatrixXd expected = ref + f * ref + (f * ref).transpose();
  CHECK((flexseas::longrun_sigma0(spec) - expected).cwiseAbs().maxCoeff() <=
        1e-9);
}

TEST_CASE("simulation is deterministic in the seed") {
  const ErrorProcessSpec spec = ar1_scalar(0.6);
  const Eigen::MatrixXd a = flexseas::simulate(spec, 500, 7);
  const Eigen::MatrixXd b = flexseas::simulate(spec, 500, 7);
  const Eigen::MatrixXd c = flexseas::simulate(spec, 500, 8);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);

  Eigen::MatrixXd buf;
  flexseas::simulate_into(spec, 500, 7, buf);
  CHECK((a - buf).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("empirical moments of simulated paths match the analytics") {
  const int n = 100000;

  // Scalar AR(1): lag autocovariances within a few MC standard errors.
  const ErrorProcessSpec ar = ar1_scalar(0.5);
  const Eigen::MatrixXd path = flexseas::simulate(ar, n, 314159);
  CHECK(flexseas::empirical_autocov(path, 0)(0, 0) ==
        doctest::Approx(4.0 / 3.0).epsilon(0.03));
  CHECK(flexseas::empirical_autocov(path, 1)(0, 0) ==
        doctest::Approx(2.0 / 3.0).epsilon(0.05));
  CHECK(std::abs(path.col(0).mean()) <= 0.02);

  // Scalar MA(1).
  const ErrorProcessSpec ma = ma1_scalar(0.8);
  const Eigen::MatrixXd mpath = flexseas::simulate(ma, n, 271828);
  CHECK(flexseas::empirical_autocov(mpath, 0)(0, 0) ==
        doctest::Approx(1.64).epsilon(0.03));
  CHECK(flexseas::empirical_autocov(mpath, 1)(0, 0) ==
        doctest::Approx(0.8).epsilon(0.05));
  CHECK(std::abs(flexseas::empirical_autocov(mpath, 2)(0, 0)) <= 0.02);

  // Multivariate VAR(1) with a non-symmetric transition: the empirical
  // statistic (n-k)^-1 sum e_i e_{i+k}' estimates R(k)'.
  Eigen::MatrixXd phi(2, 2);
  phi << 0.5, 0.2, -0.1, 0.3;
  ErrorProcessSpec var;
  var.variant = ErrorVariant::Var1;
  var.d = 2;
  var.sigma_eps = Eigen::MatrixXd::Identity(2, 2);
  var.phi = phi;
  const Eigen::MatrixXd vpath = flexseas::simulate(var, n, 55555);
  const Eigen::MatrixXd emp1 = flexseas::empirical_autocov(vpath, 1);
  const Eigen::MatrixXd ana1 = flexseas::autocov(var, 1).transpose();
  CHECK((emp1 - ana1).cwiseAbs().maxCoeff() <= 0.03);
}

TEST_CASE("iid sample mean is tiny at n=1e6") {
  ErrorProcessSpec spec = iid_spec(Eigen::MatrixXd::Identity(2, 2));
  const Eigen::MatrixXd path = flexseas::simulate(spec, 1000000, 42);
  CHECK(path.colwise().mean().cwiseAbs().maxCoeff() <= 0.004);
  // Columns are uncorrelated under the identity innovation covariance.
  CHECK(std::abs(flexseas::empirical_autocov(path, 0)(0, 1)) <= 0.004);
}

TEST_CASE("rademacher-scaled innovations") {
  ErrorProcessSpec spec = iid_spec(Eigen::MatrixXd::Identity(1, 1) * 2.25);
  spec.law = InnovationLaw::RademacherScaled;
  const Eigen::MatrixXd path = flexseas::simulate(spec, 2000, 11);
  // Every draw is +-1.5 exactly (L = 1.5 for sigma2 = 2.25).
  for (int i = 0; i < path.rows(); ++i) {
    CHECK(std::abs(std::abs(path(i, 0)) - 1.5) <= 1e-15);
  }

  // The weakly-dependent-but-not-mixing AR example still has the AR(1)
  // second-order structure.
  ErrorProcessSpec ar = ar1_scalar(0.5, 0.75);
  ar.law = InnovationLaw::RademacherScaled;
  const Eigen::MatrixXd arpath = flexseas::simulate(ar, 100000, 99);
  const double r0 = flexseas::empirical_autocov(arpath, 0)(0, 0);
  const double r1 = flexseas::empirical_autocov(arpath, 1)(0, 0);
  CHECK(r0 == doctest::Approx(1.0).epsilon(0.03));  // 0.75 / (1 - 0.25)
  CHECK(r1 / r0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("empirical_autocov input checks and exactness") {
  Eigen::MatrixXd sample = Eigen::MatrixXd::Zero(10, 2);
  CHECK(flexseas::empirical_autocov(sample, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(flexseas::empirical_autocov(sample, 10),
                  flexseas::DimensionError);
  CHECK_THROWS_AS(flexseas::empirical_autocov(sample, -1),
                  flexseas::DimensionError);

  // Hand check on a 3-observation scalar series.
  Eigen::MatrixXd tiny(3, 1);
  tiny << 1.0, 2.0, -1.0;
  CHECK(flexseas::empirical_autocov(tiny, 0)(0, 0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(flexseas::empirical_autocov(tiny, 1)(0, 0) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("dependence bounds dominate the autocovariances and decay") {
  // iid: zero beyond lag 0.
  const ErrorProcessSpec iid = iid_spec(Eigen::MatrixXd::Identity(2, 2));
  CHECK(flexseas::dependence_bound(iid, 0) >= 1.0);
  CHECK(flexseas::dependence_bound(iid, 1) == 0.0);

  // vma_q: exactly zero past q.
  ErrorProcessSpec vma;
  vma.variant = ErrorVariant::VmaQ;
  vma.d = 1;
  vma.sigma_eps = Eigen::MatrixXd::Identity(1, 1);
  vma.theta = {Eigen::MatrixXd::Constant(1, 1, 0.8),
               Eigen::MatrixXd::Constant(1, 1, -0.4)};
  CHECK(flexseas::dependence_bound(vma, 3) == 0.0);
  CHECK(flexseas::dependence_bound(vma, 2) > 0.0);

  // var_1 with a non-normal transition matrix.
  Eigen::MatrixXd phi(2, 2);
  phi << 0.5, 0.3, 0.0, 0.4;
  ErrorProcessSpec var;
  var.variant = ErrorVariant::Var1;
  var.d = 2;
  var.sigma_eps = Eigen::MatrixXd::Identity(2, 2);
  var.phi = phi;

  for (const auto& spec : {iid, vma, var}) {
    const flexseas::DependenceBound bound = flexseas::dependence_bound(spec);
    CHECK(bound.summable);
    double prev = bound.at(0);
    for (int r = 1; r <= 30; ++r) {
      const double cur = bound.at(r);
      CHECK(cur <= prev + 1e-15);  // monotone nonincreasing
      const double rk = flexseas::autocov(spec, r).cwiseAbs().maxCoeff();
      INFO("r=", r, " bound=", cur, " ||R(r)||=", rk);
      CHECK(rk <= cur * (1.0 + 1e-12) + 1e-300);
      prev = cur;
    }
  }

  // Geometric decay for var_1: bound at r+1 over bound at r tends to rho.
  const flexseas::DependenceBound vb = flexseas::dependence_bound(var);
  CHECK(vb.at(20) / vb.at(19) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("long-run covariance is PSD and truncation-stable") {
  Eigen::MatrixXd phi(2, 2);
  phi << 0.6, 0.1, -0.2, 0.5;
  ErrorProcessSpec var;
  var.variant = ErrorVariant::Var1;
  var.d = 2;
  var.sigma_eps = Eigen::MatrixXd::Identity(2, 2);
  var.phi = phi;

  const Eigen::MatrixXd coarse = flexseas::longrun_sigma0(var, 1e-6);
  const Eigen::MatrixXd fine = flexseas::longrun_sigma0(var, 1e-12);
  CHECK((coarse - fine).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK((fine - fine.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fine);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}
