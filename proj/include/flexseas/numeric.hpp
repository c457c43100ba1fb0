#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace flexseas {

/// Neumaier-compensated running sum. Used wherever long index sums feed
/// quantities that are asserted to near machine precision.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Two-sided 95% normal quantile.
inline constexpr double kNormalQuantile975 = 1.959963984540054;

/// Composite Gauss-Legendre quadrature of f over [a, b] split into equal
/// panels. `order` nodes per panel; nodes are computed once per order and
/// cached.
double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int panels = 8, int order = 20);

/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& legendre_rule(
    int order);

}  // namespace flexseas
