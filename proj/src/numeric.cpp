#include "flexseas/numeric.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace flexseas {

namespace {

// Legendre P_order and its derivative at x, by the three-term recurrence.
std::pair<double, double> legendre_pd(int order, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= order; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = order * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

std::pair<std::vector<double>, std::vector<double>> build_rule(int order) {
  std::vector<double> nodes(order), weights(order);
  // Roots of P_order, Newton iteration from the Chebyshev-like initial
  // guess; symmetry fills the mirrored half.
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_pd(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre_pd(order, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    weights[i] = w;
    nodes[order - 1 - i] = x;
    weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) nodes[order / 2] = 0.0;
  return {std::move(nodes), std::move(weights)};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& legendre_rule(
    int order) {
  if (order < 1) throw std::invalid_argument("legendre_rule: order < 1");
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b, int panels, int order) {
  const auto& [nodes, weights] = legendre_rule(order);
  const double width = (b - a) / panels;
  KahanSum total;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    const double scale = 0.5 * width;
    for (int k = 0; k < order; ++k) {
      total.add(weights[k] * scale * f(mid + scale * nodes[k]));
    }
  }
  return total.value();
}

}  // namespace flexseas
