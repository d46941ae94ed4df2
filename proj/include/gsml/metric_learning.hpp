#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gsml/geodesic.hpp"
#include "gsml/surfaces.hpp"
#include "gsml/transform.hpp"

namespace gsml {

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Similar (same label) and dissimilar pairs, each i < j in lexicographic
/// order.
struct PairSets {
  std::vector<IndexPair> similar;
  std::vector<IndexPair> dissimilar;
};

/// (i, j, l): j is a target neighbor of i, l an imposter with another label.
struct Triple {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t l = 0;
};

struct TripleSet {
  std::vector<Triple> triples;
};

enum class ObjectiveKind { kMmc, kLmnn };

enum class GradientMode {
  kAuto,              // analytic chain rule (envelope gradient on refined paths)
  kFiniteDifference,  // central differences of the objective over the d*d entries
  kAnalytic,
};

struct OptimizerConfig {
  double lambda = 1.0;
  int max_iters = 200;
  double grad_step = 1e-4;
  double learning_rate = 0.1;
  double shrink = 0.5;
  double min_step = 1e-8;
  double rel_tol = 1e-6;
  int n_target_neighbors = 3;
  int max_imposters = 50;
  GradientMode gradient = GradientMode::kAuto;
  std::uint64_t seed = 0;

  void validate() const;
};

/// rho^F_L(x_i, x_j) = rho^F(F(L b_i), F(L b_j)). Throws NumericalError
/// ("transform leaves domain") when L b leaves the base space.
double transformed_distance(const Surface& surface, const LinearTransform& L, const Vector& b_i,
                            const Vector& b_j, const GeodesicConfig& config);

/// The per-pair quantity the objectives sum: the squared distance on
/// Euclidean surfaces (the classical Mahalanobis form), rho^F_L otherwise.
double objective_distance(const Surface& surface, const LinearTransform& L, const Vector& b_i,
                          const Vector& b_j, const GeodesicConfig& config);

PairSets build_pair_sets(const std::vector<int>& labels);

/// sum_P d_L - lambda * sum_Q d_L with d_L = objective_distance.
double mmc_objective(const Surface& surface, const LinearTransform& L,
                     const std::vector<Vector>& points, const PairSets& pairs, double lambda,
                     const GeodesicConfig& config);

/// sum over distinct target pairs (i, j) of d_L(i, j) plus
/// lambda * sum over triples of [1 + d_L(i, j) - d_L(i, l)]_+.
/// The pull term counts each (i, j) appearing in `targets` once.
double lmnn_objective(const Surface& surface, const LinearTransform& L,
                      const std::vector<Vector>& points,
                      const std::vector<std::vector<std::size_t>>& targets,
                      const TripleSet& triples, double lambda, const GeodesicConfig& config);

/// For each point, its k_t nearest same-label points under L = I, ordered by
/// distance with ties going to the lower index. Lists are shorter when the
/// class is too small.
std::vector<std::vector<std::size_t>> select_target_neighbors(
    const Surface& surface, const std::vector<Vector>& points, const std::vector<int>& labels,
    int k_t, const GeodesicConfig& config);

/// Every triple (i, j, l) with j a target of i and l of another label.
TripleSet all_triples(const std::vector<std::vector<std::size_t>>& targets,
                      const std::vector<int>& labels);

/// Imposters under the given pairwise objective distances: triples whose
/// hinge is active, at most `cap` per (i, j), nearest imposters first.
TripleSet active_triples(const std::vector<std::vector<std::size_t>>& targets,
                         const std::vector<int>& labels, const Matrix& objective_distances,
                         int cap);

struct TraceRow {
  int iteration = 0;
  double value = 0.0;
  double step = 0.0;
};

struct FitResult {
  LinearTransform transform;
  std::vector<TraceRow> trace;
  bool converged = false;
  /// Set when the very first line search found no decrease; transform is
  /// then the identity.
  bool no_descent = false;
  std::string status;
};

/// Gradient descent on L from the identity with a backtracking line search
/// along the normalized negative gradient. Every accepted step strictly
/// lowers the objective. MMC steps are followed by rescaling L to Frobenius
/// norm sqrt(d), since the MMC objective is unbounded below in the scale of L.
FitResult fit(const Surface& surface, const std::vector<Vector>& points,
              const std::vector<int>& labels, ObjectiveKind kind, const OptimizerConfig& opt,
              const GeodesicConfig& geo);

/// Objective gradient with respect to the entries of L, as used by fit.
Matrix objective_gradient(const Surface& surface, const LinearTransform& L,
                          const std::vector<Vector>& points, const std::vector<int>& labels,
                          ObjectiveKind kind, const OptimizerConfig& opt,
                          const GeodesicConfig& geo, GradientMode mode);

/// Full objective value as minimized by fit (LMNN over all triples built from
/// targets selected at L = I).
double objective_value(const Surface& surface, const LinearTransform& L,
                       const std::vector<Vector>& points, const std::vector<int>& labels,
                       ObjectiveKind kind, const OptimizerConfig& opt, const GeodesicConfig& geo);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace gsml
