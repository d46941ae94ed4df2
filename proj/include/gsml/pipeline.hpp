#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsml/clustering.hpp"
#include "gsml/datasets.hpp"
#include "gsml/geodesic.hpp"
#include "gsml/graph_embed.hpp"
#include "gsml/metric_learning.hpp"
#include "gsml/neighbors_eval.hpp"

namespace gsml {

inline constexpr const char* kVersion = "0.1.0";

struct KnnStageConfig {
  int k = 5;
  int n_splits = 10;
  double test_frac = 0.2;
  /// Base dimension of the Euclidean and hyperboloid embeddings compared in
  /// the results table.
  int dim = 2;
};

struct KMeansStageConfig {
  /// 0 means the number of classes in the dataset.
  int k = 0;
  int restarts = 10;
  int max_passes = 100;
};

struct GapStageConfig {
  std::vector<std::size_t> m_values = {25, 50, 100, 200, 400};
  int n_trials = 5;
  std::size_t pool_size = 0;
  GaussianPairParams gaussian;
};

/// Endpoints for a single geodesic query and the ratio sweep settings.
struct GeodesicStageConfig {
  std::vector<double> x;
  std::vector<double> y;
  bool sweep = false;
  std::vector<int> sweep_n = {0, 2, 4, 8, 16};
  int sweep_pairs = 50;
  double sweep_radius = 2.0;
};

/// Everything a run depends on. Built from defaults, then a JSON config
/// file, then command-line flags, each layer overriding the previous.
struct PipelineConfig {
  std::string surface = "hyperboloid:2";
  std::string dataset;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;

  ObjectiveKind objective = ObjectiveKind::kLmnn;
  /// Transform CSV applied before clustering (empty: identity unless learn).
  std::string transform;
  /// Learn an MMC transform before clustering.
  bool learn = false;
  /// Embed only the largest component of a disconnected graph.
  bool largest_component = false;
  /// Points per cluster for synthetic:helicoid-two-clusters.
  std::size_t synthetic_per_cluster = 20;

  GeodesicConfig geodesic;
  OptimizerConfig optimizer;
  MdsConfig mds;
  KnnStageConfig knn;
  KMeansStageConfig kmeans;
  GapStageConfig gap;
  GeodesicStageConfig query;

  /// Overlays the keys present in j. Unknown keys are an InputError.
  void merge_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Hash of the settings that can change results (not out_dir or threads).
  std::string hash() const;
  void validate() const;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

std::string objective_name(ObjectiveKind kind);
ObjectiveKind parse_objective(const std::string& name);

/// Header comment lines written at the top of every output file.
void write_provenance(std::ostream& out, const std::string& command, const PipelineConfig& config);

/// A labeled point set resolved from PipelineConfig::dataset: an embedding
/// CSV, synthetic:helicoid-two-clusters, or a graph (built-in name or GML
/// file) embedded on the configured surface.
struct PointDataset {
  std::string name;
  std::vector<long long> ids;
  BasePointSet points;
};

bool is_graph_dataset(const std::string& dataset);
GraphDataset load_graph_dataset(const std::string& dataset, std::uint64_t seed);
PointDataset load_point_dataset(const PipelineConfig& config, const Surface& surface);

/// Subcommands. Each writes its files into config.out_dir and returns their
/// paths.
std::vector<std::filesystem::path> run_embed(const PipelineConfig& config);
std::vector<std::filesystem::path> run_learn(const PipelineConfig& config);
std::vector<std::filesystem::path> run_cluster(const PipelineConfig& config);
std::vector<std::filesystem::path> run_knn(const PipelineConfig& config);
std::vector<std::filesystem::path> run_geodesic(const PipelineConfig& config);
std::vector<std::filesystem::path> run_gap_curve(const PipelineConfig& config);
/// Writes the built-in graph config.dataset as GML.
std::vector<std::filesystem::path> run_export_dataset(const PipelineConfig& config);

/// The four-setting comparison behind the knn results table: the graph is
/// embedded on euclidean:dim and hyperboloid:dim, and each embedding is
/// evaluated with and without metric learning on shared splits.
std::vector<EvalReport> knn_comparison(const GraphDataset& graph, const PipelineConfig& config);

inline const std::vector<std::string>& knn_settings() {
  static const std::vector<std::string> names = {"Euclidean", "Euclidean+ML", "Hyperbolic", "Hyperbolic+ML"};
  return names;
}

/// Mean ratio of refined to closed-form distance for each n.
struct RatioPoint {
  int n_intermediate = 0;
  double mean_ratio = 0.0;
  double max_ratio = 0.0;
};

/// Pairs are drawn uniformly from the base ball of radius stage.sweep_radius
/// and shared across n. The surface needs a closed-form distance.
std::vector<RatioPoint> ratio_sweep(const Surface& surface, const GeodesicConfig& base,
                                    const GeodesicStageConfig& stage, std::uint64_t seed);
void write_ratio_csv(std::ostream& out, const std::vector<RatioPoint>& sweep);

}  // namespace gsml
