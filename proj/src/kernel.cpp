#include "flexseas/kernel.hpp"

#include <cmath>

#include "flexseas/errors.hpp"
#include "flexseas/numeric.hpp"

namespace flexseas {

namespace {

// The polynomial families are all c (1 - u^2)^p on [-1, 1].
struct PolyParams {
  double c;
  int p;
};

PolyParams poly_params(KernelFamily family) {
  switch (family) {
    case KernelFamily::Epanechnikov:
      return {0.75, 1};
    case KernelFamily::Quartic:
      return {15.0 / 16.0, 2};
    case KernelFamily::Triweight:
      return {35.0 / 32.0, 3};
    default:
      throw ConfigError("internal: not a polynomial kernel family");
  }
}

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1 / sqrt(2 pi)

// Mass of the standard normal on [-r, r]; the truncated Gaussian divides
// by this so it stays a density.
double gaussian_mass(double radius) {
  return std::erf(radius / std::sqrt(2.0));
}

double check_moment_order(int k) {
  if (k < 0 || k > 4) {
    throw DomainError("kernel moments are defined for k in 0..4, got k=" +
                      std::to_string(k));
  }
  return 0.0;
}

}  // namespace

KernelSpec KernelSpec::make(KernelFamily family) {
  KernelSpec spec;
  spec.family = family;
  spec.support_halfwidth =
      (family == KernelFamily::TruncatedGaussian) ? 4.0 : 1.0;
  return spec;
}

KernelSpec KernelSpec::truncated_gaussian(double radius) {
  if (!(radius > 0.0)) {
    throw ConfigError("truncated-gaussian radius must be positive, got " +
                      std::to_string(radius));
  }
  KernelSpec spec;
  spec.family = KernelFamily::TruncatedGaussian;
  spec.support_halfwidth = radius;
  return spec;
}

KernelSpec KernelSpec::from_name(std::string_view name) {
  if (name == "epanechnikov") return make(KernelFamily::Epanechnikov);
  if (name == "quartic") return make(KernelFamily::Quartic);
  if (name == "triweight") return make(KernelFamily::Triweight);
  if (name == "truncated-gaussian")
    return make(KernelFamily::TruncatedGaussian);
  throw ConfigError(
      "unknown kernel \"" + std::string(name) +
      "\" (expected epanechnikov | quartic | triweight | truncated-gaussian)");
}

std::string KernelSpec::name() const {
  switch (family) {
    case KernelFamily::Epanechnikov:
      return "epanechnikov";
    case KernelFamily::Quartic:
      return "quartic";
    case KernelFamily::Triweight:
      return "triweight";
    case KernelFamily::TruncatedGaussian:
      return "truncated-gaussian";
  }
  return "unknown";
}

double KernelSpec::lipschitz_constant() const {
  // max |K'(u)| per family, from setting the second derivative to zero.
  switch (family) {
    case KernelFamily::Epanechnikov:
      return 1.5;  // |K'| maximal at u = 1
    case KernelFamily::Quartic:
      return 2.5 / std::sqrt(3.0);  // at u = 1/sqrt(3)
    case KernelFamily::Triweight:
      return 21.0 / (5.0 * std::sqrt(5.0));  // at u = 1/sqrt(5)
    case KernelFamily::TruncatedGaussian:
      // |K'(u)| = |u| K(u) peaks at u = 1.
      return kInvSqrt2Pi * std::exp(-0.5) / gaussian_mass(support_halfwidth);
  }
  return 0.0;
}

double eval(const KernelSpec& spec, double u) {
  // Everything below depends on u only through u^2, so K(u) == K(-u)
  // bit-for-bit.
  const double u2 = u * u;
  const double s = spec.support_halfwidth;
  if (u2 > s * s) return 0.0;
  if (spec.family == KernelFamily::TruncatedGaussian) {
    return kInvSqrt2Pi * std::exp(-0.5 * u2) / gaussian_mass(s);
  }
  const auto [c, p] = poly_params(spec.family);
  if (u2 > 1.0) return 0.0;
  double base = 1.0 - u2;
  double out = c;
  for (int i = 0; i < p; ++i) out *= base;
  return out;
}

double eval_scaled(const KernelSpec& spec, double h, double u) {
  if (!(h > 0.0)) {
    throw BandwidthError("bandwidth must be positive, got h=" +
                         std::to_string(h));
  }
  return eval(spec, u / h) / h;
}

double moment(const KernelSpec& spec, int k) {
  check_moment_order(k);
  if (k % 2 == 1) return 0.0;  // symmetry, exact by fiat
  if (spec.family == KernelFamily::TruncatedGaussian) {
    const double r = spec.support_halfwidth;
    const auto f = [&](double u) { return std::pow(u, k) * eval(spec, u); };
    // Even integrand: integrate the right half and double.
    const int panels = std::max(8, static_cast<int>(std::ceil(2.0 * r)));
    return 2.0 * gauss_legendre(f, 0.0, r, panels, 30);
  }
  // integral of u^k c (1-u^2)^p over [-1,1] = c B((k+1)/2, p+1) for even k.
  const auto [c, p] = poly_params(spec.family);
  return c * std::beta((k + 1) / 2.0, p + 1.0);
}

double sq_moment(const KernelSpec& spec, int k) {
  check_moment_order(k);
  if (k % 2 == 1) return 0.0;
  if (spec.family == KernelFamily::TruncatedGaussian) {
    const double r = spec.support_halfwidth;
    const auto f = [&](double u) {
      const double kv = eval(spec, u);
      return std::pow(u, k) * kv * kv;
    };
    const int panels = std::max(8, static_cast<int>(std::ceil(2.0 * r)));
    return 2.0 * gauss_legendre(f, 0.0, r, panels, 30);
  }
  const auto [c, p] = poly_params(spec.family);
  return c * c * std::beta((k + 1) / 2.0, 2.0 * p + 1.0);
}

}  // namespace flexseas
