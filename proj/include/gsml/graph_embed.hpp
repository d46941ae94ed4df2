#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gsml/geodesic.hpp"
#include "gsml/surfaces.hpp"

namespace gsml {

/// Undirected labeled graph. Node i has GML id ids[i]; edges hold node
/// indices with first < second, sorted and without duplicates.
struct GraphDataset {
  std::string name;
  std::vector<long long> ids;
  /// GML `label` strings (may be empty).
  std::vector<std::string> names;
  /// Raw class of each node: `value` when present, otherwise `label`.
  std::vector<std::string> classes;
  /// Class index of each node: rank of its raw class among the distinct
  /// classes (numeric order when every class is an integer).
  std::vector<int> labels;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::size_t size() const { return ids.size(); }
  int class_count() const;

  /// Drops self-loops, deduplicates and sorts edges, and recomputes labels
  /// from classes. Throws InputError on dangling endpoints or duplicate ids.
  void normalize();
};

GraphDataset load_gml(const std::filesystem::path& path);
GraphDataset parse_gml(std::istream& in, const std::string& source = "<stream>");
void save_gml(std::ostream& out, const GraphDataset& graph);

/// Connected components as lists of node indices, largest first (ties by
/// smallest member).
std::vector<std::vector<std::size_t>> connected_components(const GraphDataset& graph);

/// Induced subgraph on the largest connected component.
GraphDataset largest_component(const GraphDataset& graph);

/// Hop-count shortest paths by breadth-first search. Throws InputError naming
/// the components when the graph is disconnected.
Matrix graph_distances(const GraphDataset& graph);

/// Header row of node ids, then one matrix row per node.
void write_dissimilarity_csv(std::ostream& out, const std::vector<long long>& ids, const Matrix& delta);
std::pair<std::vector<long long>, Matrix> read_dissimilarity_csv(const std::filesystem::path& path);

struct MdsConfig {
  double tau = 1.0;
  int max_iters = 500;
  double learning_rate = 0.1;
  double shrink = 0.5;
  double min_step = 1e-12;
  double rel_tol = 1e-9;
  double init_sd = 0.1;
  int max_reinit = 5;
  /// Independent seeded starts; the lowest final stress wins.
  int restarts = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct StressRow {
  int iteration = 0;
  double stress = 0.0;
  double step = 0.0;
};

struct MdsResult {
  std::vector<Vector> points;
  double stress = 0.0;
  /// Trace of the winning start.
  std::vector<StressRow> trace;
  int reinitializations = 0;
  int best_restart = 0;
};

/// Raw stress sum_{i<j} (rho(b_i, b_j) - tau * delta_ij)^2.
double stress(const Surface& surface, const std::vector<Vector>& points, const Matrix& delta,
              double tau, const GeodesicConfig& geo);

/// Stress gradient with respect to every base coordinate. Coincident pairs
/// are separated by a tiny seeded perturbation for the evaluation.
std::vector<Vector> stress_gradient(const Surface& surface, const std::vector<Vector>& points,
                                    const Matrix& delta, double tau, const GeodesicConfig& geo);

/// Gradient descent on raw stress from per-node Gaussian starts (each node
/// seeded from its id, so a start does not depend on node order), with a
/// backtracking line search. Runs `restarts` starts and keeps the lowest
/// stress, ties to the earlier start. The returned trace is non-increasing.
MdsResult mds_embed(const Surface& surface, const Matrix& delta, const std::vector<long long>& ids,
                    const MdsConfig& config, const GeodesicConfig& geo);

/// node, b1..bd, label
void write_embedding_csv(std::ostream& out, const std::vector<long long>& ids,
                         const std::vector<Vector>& points, const std::vector<int>& labels);

struct Embedding {
  std::vector<long long> ids;
  BasePointSet points;
};

Embedding read_embedding_csv(const std::filesystem::path& path);

void write_stress_csv(std::ostream& out, const std::vector<StressRow>& trace);

}  // namespace gsml
