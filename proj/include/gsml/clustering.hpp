#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gsml/surfaces.hpp"

namespace gsml {

/// Cluster labels are 0-based, in [0, k).
struct ClusterAssignment {
  std::vector<int> labels;
  int k = 0;
  double cost = 0.0;
  int passes = 0;
  /// Cost before the first move and after every accepted move of the
  /// winning restart.
  std::vector<double> cost_trace;
};

/// Number of points sharing point i's cluster, i included.
int counting(const std::vector<int>& labels, std::size_t i);

/// C = sum_i sum_j [y_i = y_j] rho_ij / (2 K(y_i)). With `squared` the
/// entries of dist are squared first.
double cost_of(const std::vector<int>& labels, const Matrix& dist, bool squared = false);

/// Running cost of a partition. Keeps per-cluster sizes and within-cluster
/// sums so that a single relabel costs O(n) to evaluate.
class PartitionCost {
 public:
  PartitionCost(const Matrix& dist, std::vector<int> labels, int k);

  double cost() const { return cost_; }
  const std::vector<int>& labels() const { return labels_; }

  /// Cost after moving point i to cluster c, without moving it.
  double cost_if_moved(std::size_t i, int c) const;
  /// Costs after moving point i to every cluster (entry labels()[i] is the
  /// current cost).
  std::vector<double> costs_if_moved(std::size_t i) const;
  void move(std::size_t i, int c);

 private:
  const Matrix& dist_;
  std::vector<int> labels_;
  std::vector<int> sizes_;
  std::vector<double> within_;  // ordered-pair sums W_c
  double cost_ = 0.0;

  double cluster_term(double w, int size) const { return size > 0 ? w / (2.0 * size) : 0.0; }
  std::vector<double> sums_to_clusters(std::size_t i) const;
};

struct KMeansConfig {
  int k = 2;
  int restarts = 10;
  int max_passes = 100;
  std::uint64_t seed = 0;
  /// Square the distances before clustering (Euclidean equivalence checks).
  bool squared = false;

  void validate(std::size_t n) const;
};

/// Hartigan-style local search: random initial labels, then passes over the
/// points, moving each to the cluster with the lowest resulting cost when
/// that is strictly lower. Stops after a pass with no move. Best restart
/// wins; ties go to the earlier restart.
ClusterAssignment kmeans_fit(const Matrix& dist, const KMeansConfig& config);

/// Checks a dissimilarity matrix: square, finite, symmetric, zero diagonal,
/// nonnegative. Throws InputError.
void validate_distance_matrix(const Matrix& dist);

void write_assignment_csv(std::ostream& out, const std::vector<int>& labels);
std::vector<int> read_assignment_csv(const std::filesystem::path& path);

}  // namespace gsml
