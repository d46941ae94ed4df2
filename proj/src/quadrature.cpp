#include "gsml/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "gsml/errors.hpp"

namespace gsml {

GaussLegendre compute_gauss_legendre(int n) {
  if (n < 1) throw InputError("quadrature needs at least one node");
  GaussLegendre rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1]; store mirrored nodes so both halves agree bitwise.
    const double offset = 0.5 * x;
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 - offset;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 + offset;
    rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.5;
  return rule;
}

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(n));
  return *slot;
}

}  // namespace gsml
