#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gsml/geodesic.hpp"
#include "gsml/metric_learning.hpp"
#include "gsml/random.hpp"
#include "gsml/surfaces.hpp"

namespace gsml {

/// Majority vote over the k nearest training points. `dist` has one row per
/// test point and one column per training point. Distance ties go to the
/// lower training index; vote ties go to the tied class whose member is
/// nearest.
std::vector<int> knn_classify(const Matrix& dist, const std::vector<int>& train_labels, int k);

double zero_one_error(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Mutual information over the arithmetic mean of the two entropies. When
/// both labelings are constant the result is 1 (identical partitions).
/// When exactly one is constant it is 0.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

struct EvalReport {
  std::string metric = "zero_one_error";
  std::string dataset;
  std::string setting;
  double mean = 0.0;
  /// Population standard deviation of the per-split values.
  double stddev = 0.0;
  std::vector<double> values;
  std::map<std::string, std::string> metadata;

  /// Fills mean and std from values.
  void summarize();
};

void write_report_csv(std::ostream& out, const EvalReport& report);

/// One row per dataset, one column per setting, cells "mean ± std".
std::string format_results_table(const std::vector<EvalReport>& reports,
                                 const std::vector<std::string>& settings);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified holdout: every class contributes round(test_frac * size)
/// members to the test side, at least one and at most size - 1. Indices on
/// both sides are sorted.
std::vector<Split> stratified_splits(const std::vector<int>& labels, int n_splits, double test_frac,
                                     std::uint64_t seed);

/// Produces predictions for split.test given the split and its seed.
using SplitPipeline = std::function<std::vector<int>(const Split& split, std::uint64_t split_seed)>;

struct SplitConfig {
  int n_splits = 10;
  double test_frac = 0.2;
  std::uint64_t seed = 0;
};

/// Runs the pipeline on each stratified split and reports the 0-1 error.
EvalReport split_eval(const std::vector<int>& labels, const SplitPipeline& pipeline,
                      const SplitConfig& config);

/// kNN pipeline on a point set: optional metric learning on the training
/// side, then kNN under rho^F_L.
struct KnnPipelineConfig {
  int k = 5;
  bool learn = false;
  ObjectiveKind objective = ObjectiveKind::kLmnn;
  OptimizerConfig optimizer;
  GeodesicConfig geodesic;
};

SplitPipeline knn_pipeline(const Surface& surface, const std::vector<Vector>& points,
                           const std::vector<int>& labels, const KnnPipelineConfig& config);

/// Loss of one labeled pair given its objective distance.
using PairLoss = std::function<double(double distance, bool same_label)>;

/// The per-pair MMC term: d for same-label pairs, -lambda * d otherwise.
PairLoss mmc_pair_loss(double lambda);

/// Mean loss over all unordered pairs of the sample under L.
double pair_error(const Surface& surface, const LinearTransform& L, const std::vector<Vector>& points,
                  const std::vector<int>& labels, const PairLoss& loss, const GeodesicConfig& geo);

/// Draws n labeled base points.
using LabeledSampler = std::function<BasePointSet(std::size_t n, Rng& rng)>;

struct GapConfig {
  std::vector<std::size_t> m_values = {25, 50, 100, 200, 400};
  int n_trials = 5;
  /// Held-out pool size; 0 means 10 * max(m_values).
  std::size_t pool_size = 0;
  std::uint64_t seed = 0;
};

struct GapPoint {
  std::size_t m = 0;
  double mean_gap = 0.0;
  double mean_train_error = 0.0;
  double mean_pool_error = 0.0;
  std::vector<double> gaps;
};

/// For each m and trial: fit MMC on m fresh samples, then record
/// pair_error(pool) - pair_error(train) for the learned L. The pool is drawn
/// once per trial and shared across m.
std::vector<GapPoint> generalization_gap_curve(const Surface& surface, const LabeledSampler& sampler,
                                               const GapConfig& config, const OptimizerConfig& opt,
                                               const GeodesicConfig& geo, const PairLoss& loss);

void write_gap_csv(std::ostream& out, const std::vector<GapPoint>& curve);

}  // namespace gsml
