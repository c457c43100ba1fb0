#pragma once

#include <string>
#include <string_view>

namespace flexseas {

enum class KernelFamily { Epanechnikov, Quartic, Triweight, TruncatedGaussian };

/// A symmetric, Lipschitz kernel with compact support [-support_halfwidth,
/// support_halfwidth] that integrates to one. The polynomial families have
/// halfwidth 1; the truncated Gaussian is cut at a finite radius (default 4)
/// and renormalized so it remains a density with compact support.
struct KernelSpec {
  KernelFamily family = KernelFamily::Epanechnikov;
  double support_halfwidth = 1.0;

  static KernelSpec make(KernelFamily family);
  static KernelSpec truncated_gaussian(double radius = 4.0);

  /// Parses the CLI family names: "epanechnikov" | "quartic" | "triweight" |
  /// "truncated-gaussian". Throws ConfigError for anything else.
  static KernelSpec from_name(std::string_view name);

  std::string name() const;

  /// An explicit Lipschitz constant for the family (max |K'|).
  double lipschitz_constant() const;
};

/// K(u). Exactly zero outside the support.
double eval(const KernelSpec& spec, double u);

/// Bandwidth-scaled evaluation K(u/h)/h. Throws BandwidthError when h <= 0.
double eval_scaled(const KernelSpec& spec, double h, double u);

/// Moment mu_k = integral of u^k K(u) du, k in 0..4. Odd k returns exactly 0.
/// Polynomial families use the closed beta-function form; the truncated
/// Gaussian integrates numerically.
double moment(const KernelSpec& spec, int k);

/// Squared-kernel moment nu_k = integral of u^k K(u)^2 du, k in 0..4.
double sq_moment(const KernelSpec& spec, int k);

}  // namespace flexseas
