#include "gsml/neighbors_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gsml/csv.hpp"
#include "gsml/errors.hpp"
#include "gsml/seeding.hpp"

namespace gsml {

namespace {

using Index = Eigen::Index;

std::vector<Vector> subset(const std::vector<Vector>& points, const std::vector<std::size_t>& idx) {
  std::vector<Vector> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(points[i]);
  return out;
}

std::vector<int> subset(const std::vector<int>& labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels[i]);
  return out;
}

double entropy(const std::map<int, std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

std::vector<int> knn_classify(const Matrix& dist, const std::vector<int>& train_labels, int k) {
  const auto n_train = static_cast<std::size_t>(dist.cols());
  if (n_train == 0 || train_labels.empty()) throw InputError("knn_classify: empty training set");
  if (train_labels.size() != n_train) {
    throw InputError("knn_classify: distance matrix has " + std::to_string(n_train) +
                     " columns but there are " + std::to_string(train_labels.size()) + " training labels");
  }
  if (k < 1) throw InputError("knn_classify: k must be >= 1");
  if (static_cast<std::size_t>(k) > n_train) {
    throw InputError("knn_classify: k = " + std::to_string(k) + " exceeds the training set size " +
                     std::to_string(n_train));
  }
  std::vector<int> predicted(static_cast<std::size_t>(dist.rows()));
  std::vector<std::size_t> order(n_train);
  for (Index t = 0; t < dist.rows(); ++t) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
      const double da = dist(t, static_cast<Index>(a));
      const double db = dist(t, static_cast<Index>(b));
      return da < db || (da == db && a < b);
    });
    // votes[label] = (count, rank of the nearest member)
    std::map<int, std::pair<int, int>> votes;
    for (int r = 0; r < k; ++r) {
      const int y = train_labels[order[static_cast<std::size_t>(r)]];
      auto [it, inserted] = votes.try_emplace(y, 0, r);
      ++it->second.first;
    }
    int best_label = 0;
    int best_count = -1;
    int best_rank = k;
    for (const auto& [y, v] : votes) {
      if (v.first > best_count || (v.first == best_count && v.second < best_rank)) {
        best_label = y;
        best_count = v.first;
        best_rank = v.second;
      }
    }
    predicted[static_cast<std::size_t>(t)] = best_label;
  }
  return predicted;
}

double zero_one_error(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.empty()) throw InputError("zero_one_error: empty input");
  if (predicted.size() != truth.size()) throw InputError("zero_one_error: length mismatch");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != truth[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty()) throw InputError("nmi: empty input");
  if (a.size() != b.size()) throw InputError("nmi: length mismatch");
  const double n = static_cast<double>(a.size());
  std::map<int, std::size_t> ca;
  std::map<int, std::size_t> cb;
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++joint[{a[i], b[i]}];
  }
  if (ca.size() == 1 && cb.size() == 1) return 1.0;
  if (ca.size() == 1 || cb.size() == 1) return 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    const double pxy = static_cast<double>(c) / n;
    const double px = static_cast<double>(ca[key.first]) / n;
    const double py = static_cast<double>(cb[key.second]) / n;
    mi += pxy * std::log(pxy / (px * py));
  }
  const double denom = 0.5 * (entropy(ca, n) + entropy(cb, n));
  return std::clamp(mi / denom, 0.0, 1.0);
}

void EvalReport::summarize() {
  if (values.empty()) {
    mean = 0.0;
    stddev = 0.0;
    return;
  }
  const double n = static_cast<double>(values.size());
  mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  stddev = std::sqrt(ss / n);
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  for (const auto& [key, value] : report.metadata) out << "# " << key << ": " << value << '\n';
  out << "dataset,setting,metric,split,value\n";
  for (std::size_t s = 0; s < report.values.size(); ++s) {
    out << report.dataset << ',' << report.setting << ',' << report.metric << ',' << s << ','
        << csv::format(report.values[s]) << '\n';
  }
  out << report.dataset << ',' << report.setting << ',' << report.metric << ",mean,"
      << csv::format(report.mean) << '\n';
  out << report.dataset << ',' << report.setting << ',' << report.metric << ",std,"
      << csv::format(report.stddev) << '\n';
}

std::string format_results_table(const std::vector<EvalReport>& reports,
                                 const std::vector<std::string>& settings) {
  std::vector<std::string> datasets;
  for (const auto& r : reports) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
      datasets.push_back(r.dataset);
    }
  }
  auto cell = [&](const std::string& dataset, const std::string& setting) -> std::string {
    for (const auto& r : reports) {
      if (r.dataset == dataset && r.setting == setting) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f ± %.2f", r.mean, r.stddev);
        return buf;
      }
    }
    return "-";
  };
  std::size_t first_width = 7;
  for (const auto& d : datasets) first_width = std::max(first_width, d.size());
  std::ostringstream out;
  auto pad = [](const std::string& s, std::size_t w) {
    // "±" is two bytes but one column wide.
    std::size_t cols = 0;
    for (unsigned char c : s) cols += (c & 0xC0) != 0x80 ? 1 : 0;
    return s + std::string(w > cols ? w - cols : 0, ' ');
  };
  std::vector<std::size_t> widths;
  for (const auto& s : settings) widths.push_back(std::max<std::size_t>(s.size(), 11));
  out << pad("Dataset", first_width);
  for (std::size_t c = 0; c < settings.size(); ++c) out << "  " << pad(settings[c], widths[c]);
  out << '\n';
  for (const auto& d : datasets) {
    out << pad(d, first_width);
    for (std::size_t c = 0; c < settings.size(); ++c) out << "  " << pad(cell(d, settings[c]), widths[c]);
    out << '\n';
  }
  return out.str();
}

std::vector<Split> stratified_splits(const std::vector<int>& labels, int n_splits, double test_frac,
                                     std::uint64_t seed) {
  if (labels.empty()) throw InputError("stratified_splits: no labels");
  if (n_splits < 1) throw InputError("n_splits must be >= 1");
  if (!(test_frac > 0.0 && test_frac < 1.0)) throw InputError("test_frac must lie in (0, 1)");
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i]].push_back(i);
  for (const auto& [y, members] : classes) {
    if (members.size() < 2) {
      throw InputError("class " + std::to_string(y) + " has fewer than 2 members and cannot be stratified");
    }
  }
  std::vector<Split> splits;
  for (int s = 0; s < n_splits; ++s) {
    Rng rng(combine_seed(seed, static_cast<std::uint64_t>(s)));
    Split split;
    for (const auto& [y, members] : classes) {
      std::vector<std::size_t> shuffled = members;
      rng.shuffle(shuffled.begin(), shuffled.end());
      const auto size = static_cast<double>(shuffled.size());
      auto n_test = static_cast<std::size_t>(std::llround(test_frac * size));
      n_test = std::clamp<std::size_t>(n_test, 1, shuffled.size() - 1);
      split.test.insert(split.test.end(), shuffled.begin(), shuffled.begin() + static_cast<long>(n_test));
      split.train.insert(split.train.end(), shuffled.begin() + static_cast<long>(n_test), shuffled.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

EvalReport split_eval(const std::vector<int>& labels, const SplitPipeline& pipeline,
                      const SplitConfig& config) {
  const std::vector<Split> splits = stratified_splits(labels, config.n_splits, config.test_frac, config.seed);
  EvalReport report;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    const std::uint64_t split_seed = combine_seed(config.seed ^ 0x5EED5EEDULL, s);
    const std::vector<int> predicted = pipeline(splits[s], split_seed);
    report.values.push_back(zero_one_error(predicted, subset(labels, splits[s].test)));
  }
  report.summarize();
  report.metadata["protocol"] = "stratified holdout " + std::to_string(config.n_splits) + " x " +
                                csv::format(1.0 - config.test_frac) + "/" + csv::format(config.test_frac);
  report.metadata["seed"] = std::to_string(config.seed);
  return report;
}

SplitPipeline knn_pipeline(const Surface& surface, const std::vector<Vector>& points,
                           const std::vector<int>& labels, const KnnPipelineConfig& config) {
  return [&surface, &points, &labels, config](const Split& split, std::uint64_t split_seed) {
    const std::vector<Vector> train = subset(points, split.train);
    const std::vector<Vector> test = subset(points, split.test);
    const std::vector<int> train_labels = subset(labels, split.train);
    LinearTransform L = LinearTransform::identity(surface.base_dim());
    if (config.learn) {
      OptimizerConfig opt = config.optimizer;
      opt.seed = split_seed;
      L = fit(surface, train, train_labels, config.objective, opt, config.geodesic).transform;
    }
    const Matrix dist = cross_distances(surface, test, train, &L, config.geodesic);
    return knn_classify(dist, train_labels, config.k);
  };
}

PairLoss mmc_pair_loss(double lambda) {
  return [lambda](double d, bool same) { return same ? d : -lambda * d; };
}

double pair_error(const Surface& surface, const LinearTransform& L, const std::vector<Vector>& points,
                  const std::vector<int>& labels, const PairLoss& loss, const GeodesicConfig& geo) {
  if (points.size() < 2) throw InputError("pair_error needs at least two points");
  if (labels.size() != points.size()) throw InputError("pair_error: label count mismatch");
  Matrix d = pairwise_distances(surface, points, &L, geo);
  if (surface.kind() == SurfaceKind::kEuclidean) d = d.cwiseProduct(d);
  // Running mean: a constant loss gives back that constant exactly.
  double mean = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double v = loss(d(static_cast<Index>(i), static_cast<Index>(j)), labels[i] == labels[j]);
      ++count;
      mean += (v - mean) / static_cast<double>(count);
    }
  }
  return mean;
}

std::vector<GapPoint> generalization_gap_curve(const Surface& surface, const LabeledSampler& sampler,
                                               const GapConfig& config, const OptimizerConfig& opt,
                                               const GeodesicConfig& geo, const PairLoss& loss) {
  if (config.m_values.empty()) throw InputError("m_values must not be empty");
  if (config.n_trials < 1) throw InputError("n_trials must be >= 1");
  for (std::size_t m : config.m_values) {
    if (m < 2) throw InputError("every m must be >= 2");
  }
  const std::size_t max_m = *std::max_element(config.m_values.begin(), config.m_values.end());
  const std::size_t pool_size = config.pool_size > 0 ? config.pool_size : 10 * max_m;

  std::vector<GapPoint> curve;
  for (std::size_t m : config.m_values) curve.push_back({m, 0.0, 0.0, 0.0, {}});
  for (int trial = 0; trial < config.n_trials; ++trial) {
    Rng pool_rng(combine_seed(config.seed, 0x9001ULL + static_cast<std::uint64_t>(trial)));
    const BasePointSet pool = sampler(pool_size, pool_rng);
    pool.validate(surface);
    if (!pool.labels) throw InputError("sampler must produce labels");
    for (GapPoint& point : curve) {
      Rng rng(combine_seed(combine_seed(config.seed, point.m), static_cast<std::uint64_t>(trial)));
      const BasePointSet train = sampler(point.m, rng);
      train.validate(surface);
      if (!train.labels) throw InputError("sampler must produce labels");
      const FitResult fitted = fit(surface, train.points, *train.labels, ObjectiveKind::kMmc, opt, geo);
      const double train_error = pair_error(surface, fitted.transform, train.points, *train.labels, loss, geo);
      const double pool_error = pair_error(surface, fitted.transform, pool.points, *pool.labels, loss, geo);
      point.gaps.push_back(pool_error - train_error);
      point.mean_train_error += train_error / config.n_trials;
      point.mean_pool_error += pool_error / config.n_trials;
    }
  }
  for (GapPoint& point : curve) {
    point.mean_gap = std::accumulate(point.gaps.begin(), point.gaps.end(), 0.0) /
                     static_cast<double>(point.gaps.size());
  }
  return curve;
}

void write_gap_csv(std::ostream& out, const std::vector<GapPoint>& curve) {
  out << "m,mean_gap,mean_train_error,mean_pool_error\n";
  for (const GapPoint& p : curve) {
    out << p.m << ',' << csv::format(p.mean_gap) << ',' << csv::format(p.mean_train_error) << ','
        << csv::format(p.mean_pool_error) << '\n';
  }
}

}  // namespace gsml
