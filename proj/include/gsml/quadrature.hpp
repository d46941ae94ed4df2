#pragma once

#include <vector>

namespace gsml {

/// Gauss-Legendre rule mapped to [0, 1]. Nodes come in mirrored pairs
/// t and 1 - t with equal weights.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule with n nodes (n >= 1). Thread-safe; the returned reference
/// stays valid for the lifetime of the program.
const GaussLegendre& gauss_legendre(int n);

GaussLegendre compute_gauss_legendre(int n);

}  // namespace gsml
