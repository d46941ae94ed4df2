#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gsml/datasets.hpp"
#include "gsml/errors.hpp"
#include "gsml/neighbors_eval.hpp"
#include "gsml/random.hpp"

using namespace gsml;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

Matrix cross(const std::vector<Vector>& test, const std::vector<Vector>& train) {
  Matrix d(static_cast<Eigen::Index>(test.size()), static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t j = 0; j < train.size(); ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (test[i] - train[j]).norm();
    }
  }
  return d;
}

// Brute force: sort all neighbors, count votes, and break ties by the first
// class met in sorted order.
int brute_force_vote(const std::vector<double>& row, const std::vector<int>& labels, int k) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t j = 0; j < row.size(); ++j) order.emplace_back(row[j], j);
  std::sort(order.begin(), order.end());
  std::map<int, int> count;
  for (int r = 0; r < k; ++r) ++count[labels[order[static_cast<std::size_t>(r)].second]];
  int top = 0;
  for (const auto& [y, c] : count) top = std::max(top, c);
  for (int r = 0; r < k; ++r) {
    const int y = labels[order[static_cast<std::size_t>(r)].second];
    if (count[y] == top) return y;
  }
  return -1;
}

GeodesicConfig quick_geo() {
  GeodesicConfig c;
  c.n_intermediate = 4;
  c.n_samples = 8;
  c.quadrature_points = 8;
  c.max_sweeps = 30;
  c.patience = 5;
  return c;
}

}  // namespace

TEST_CASE("knn examples") {
  const std::vector<Vector> train = {vec({0}), vec({10})};
  const std::vector<int> labels = {7, 3};
  CHECK(knn_classify(cross({vec({1}), vec({9})}, train), labels, 1) == std::vector<int>{7, 3});
  // Equidistant from both: the lower training index is nearer by rule.
  CHECK(knn_classify(cross({vec({5})}, train), labels, 2) == std::vector<int>{7});
  CHECK(knn_classify(cross({vec({5})}, {vec({10}), vec({0})}), labels, 2) == std::vector<int>{7});
  CHECK_THROWS_AS(knn_classify(Matrix(1, 0), {}, 1), InputError);
  CHECK_THROWS_AS(knn_classify(cross({vec({5})}, train), labels, 3), InputError);
}

TEST_CASE("knn agrees with brute-force voting") {
  Rng rng(20);
  std::vector<Vector> train;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    train.push_back(rng.normal_vector(2));
    labels.push_back(static_cast<int>(rng.below(3)));
  }
  std::vector<Vector> test;
  for (int i = 0; i < 50; ++i) test.push_back(rng.normal_vector(2));
  const Matrix d = cross(test, train);
  for (int k : {1, 3, 5}) {
    const std::vector<int> predicted = knn_classify(d, labels, k);
    for (std::size_t t = 0; t < test.size(); ++t) {
      std::vector<double> row(d.cols());
      for (Eigen::Index j = 0; j < d.cols(); ++j) row[static_cast<std::size_t>(j)] = d(static_cast<Eigen::Index>(t), j);
      CHECK(predicted[t] == brute_force_vote(row, labels, k));
    }
  }
}

TEST_CASE("knn is invariant to positive rescaling") {
  Rng rng(21);
  Matrix d = Matrix::Zero(30, 25);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) d(i, j) = static_cast<double>(rng.below(6));  // many ties
  }
  std::vector<int> labels(25);
  for (auto& y : labels) y = static_cast<int>(rng.below(4));
  for (int k : {1, 3, 5, 7}) {
    const auto base = knn_classify(d, labels, k);
    for (double s : {0.001, 3.0, 1e6}) CHECK(knn_classify(d * s, labels, k) == base);
  }
}

TEST_CASE("zero-one error examples") {
  CHECK(zero_one_error({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(zero_one_error({1, 1}, {2, 2}) == 1.0);
  CHECK(zero_one_error({0, 1, 1, 0}, {0, 1, 1, 1}) == 0.25);
  CHECK_THROWS_AS(zero_one_error({}, {}), InputError);
  CHECK_THROWS_AS(zero_one_error({1}, {1, 2}), InputError);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> a(16);
    std::vector<int> b(16);
    std::size_t right = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = static_cast<int>(rng.below(3));
      b[i] = static_cast<int>(rng.below(3));
      right += a[i] == b[i] ? 1 : 0;
    }
    CHECK(zero_one_error(a, b) + static_cast<double>(right) / 16.0 == 1.0);
  }
}

TEST_CASE("nmi examples and properties") {
  CHECK(nmi({0, 0, 1, 1, 2, 2}, {0, 0, 1, 1, 2, 2}) == doctest::Approx(1.0));
  CHECK(nmi({1, 1, 2, 2}, {2, 2, 1, 1}) == doctest::Approx(1.0));
  CHECK(nmi({4, 4, 4}, {1, 1, 1}) == 1.0);
  CHECK(nmi({4, 4, 4}, {1, 2, 1}) == 0.0);
  CHECK_THROWS_AS(nmi({}, {}), InputError);

  // Hand value: a = (0,0,1,1), b = (0,0,0,1); I = 1.5 ln 2 - 0.75 ln 3,
  // H(a) = ln 2, H(b) = 2 ln 2 - 0.75 ln 3.
  const double ln2 = std::log(2.0);
  const double ln3 = std::log(3.0);
  const double expected = (1.5 * ln2 - 0.75 * ln3) / (0.5 * (ln2 + 2 * ln2 - 0.75 * ln3));
  CHECK(nmi({0, 0, 1, 1}, {0, 0, 0, 1}) == doctest::Approx(expected).epsilon(1e-12));

  Rng rng(1000);
  std::vector<int> a(1000);
  std::vector<int> b(1000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<int>(rng.below(4));
    b[i] = static_cast<int>(rng.below(4));
  }
  CHECK(nmi(a, b) <= 0.05);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> x(30);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = static_cast<int>(rng.below(3));
      y[i] = static_cast<int>(rng.below(5));
    }
    const double v = nmi(x, y);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == doctest::Approx(nmi(y, x)).epsilon(1e-14));
    std::vector<int> relabeled = x;
    for (int& z : relabeled) z = 10 - 3 * z;
    CHECK(v == doctest::Approx(nmi(relabeled, y)).epsilon(1e-12));
  }
}

TEST_CASE("report summary uses the population deviation") {
  EvalReport r;
  r.values = {0.1, 0.3};
  r.summarize();
  CHECK(r.mean == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(r.stddev == doctest::Approx(0.1).epsilon(1e-12));
  r.dataset = "toy";
  r.setting = "Euclidean";
  std::ostringstream out;
  write_report_csv(out, r);
  CHECK(out.str().find("toy,Euclidean,zero_one_error,mean,0.2") != std::string::npos);
  const std::string table = format_results_table({r}, {"Euclidean", "Hyperbolic"});
  CHECK(table.find("0.20 ± 0.10") != std::string::npos);
  CHECK(table.find("-") != std::string::npos);
}

TEST_CASE("stratified splits") {
  std::vector<int> labels;
  for (int i = 0; i < 23; ++i) labels.push_back(i < 10 ? 0 : (i < 20 ? 1 : 2));
  const auto splits = stratified_splits(labels, 5, 0.2, 9);
  CHECK(splits.size() == 5);
  for (const Split& s : splits) {
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    for (std::size_t i : s.test) CHECK(all.insert(i).second);
    CHECK(all.size() == labels.size());
    std::map<int, int> test_count;
    for (std::size_t i : s.test) ++test_count[labels[i]];
    CHECK(test_count[0] == 2);
    CHECK(test_count[1] == 2);
    CHECK(test_count[2] == 1);  // round(0.6) = 1
    CHECK(std::is_sorted(s.test.begin(), s.test.end()));
  }
  const auto again = stratified_splits(labels, 5, 0.2, 9);
  for (std::size_t s = 0; s < splits.size(); ++s) CHECK(again[s].test == splits[s].test);
  CHECK(stratified_splits(labels, 5, 0.2, 10)[0].test != splits[0].test);

  labels.push_back(5);
  CHECK_THROWS_WITH_AS(stratified_splits(labels, 5, 0.2, 9), doctest::Contains("class 5"), InputError);
}

TEST_CASE("split evaluation on separable data") {
  const auto e = euclidean_surface(2);
  std::vector<Vector> pts;
  std::vector<int> labels;
  Rng rng(4);
  for (int i = 0; i < 40; ++i) {
    const int y = i % 2;
    Vector p = rng.normal_vector(2, 0.2);
    p[0] += 10.0 * y;
    pts.push_back(p);
    labels.push_back(y);
  }
  KnnPipelineConfig cfg;
  cfg.k = 3;
  SplitConfig sc;
  sc.seed = 12;
  const EvalReport r = split_eval(labels, knn_pipeline(*e, pts, labels, cfg), sc);
  CHECK(r.values.size() == 10);
  CHECK(r.mean == 0.0);
  CHECK(r.stddev == 0.0);
}

TEST_CASE("split evaluation is reproducible") {
  const auto h = hyperboloid_surface(2);
  Rng rng(8);
  std::vector<Vector> pts;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    const int y = i % 3;
    Vector p = rng.normal_vector(2, 0.8);
    p[0] += 0.7 * y;
    pts.push_back(p);
    labels.push_back(y);
  }
  KnnPipelineConfig cfg;
  cfg.k = 3;
  cfg.learn = true;
  cfg.optimizer.max_iters = 20;
  cfg.geodesic = quick_geo();
  SplitConfig sc;
  sc.n_splits = 3;
  sc.seed = 5;
  const EvalReport a = split_eval(labels, knn_pipeline(*h, pts, labels, cfg), sc);
  const EvalReport b = split_eval(labels, knn_pipeline(*h, pts, labels, cfg), sc);
  CHECK(a.values == b.values);
  CHECK(a.mean == b.mean);
  double mean = 0.0;
  for (double v : a.values) mean += v / static_cast<double>(a.values.size());
  CHECK(std::abs(mean - a.mean) < 1e-12);
}

TEST_CASE("gap is exactly zero under a constant loss") {
  const auto e = euclidean_surface(2);
  GapConfig gc;
  gc.m_values = {10, 20};
  gc.n_trials = 2;
  gc.pool_size = 60;
  OptimizerConfig opt;
  opt.max_iters = 20;
  const LabeledSampler sampler = [](std::size_t n, Rng& rng) { return sample_gaussian_pairs(n, rng); };
  const auto curve =
      generalization_gap_curve(*e, sampler, gc, opt, quick_geo(), [](double, bool) { return 0.7; });
  REQUIRE(curve.size() == 2);
  for (const GapPoint& p : curve) {
    CHECK(p.mean_gap == 0.0);
    for (double g : p.gaps) CHECK(g == 0.0);
  }
}

TEST_CASE("gap vanishes when the training sample is the pool") {
  const auto e = euclidean_surface(2);
  // A sampler that ignores its generator returns the same data every time.
  const LabeledSampler fixed = [](std::size_t n, Rng&) {
    Rng local(77);
    return sample_gaussian_pairs(n, local);
  };
  GapConfig gc;
  gc.m_values = {40};
  gc.n_trials = 1;
  gc.pool_size = 40;
  OptimizerConfig opt;
  opt.max_iters = 30;
  const auto curve = generalization_gap_curve(*e, fixed, gc, opt, quick_geo(), mmc_pair_loss(1.0));
  CHECK(std::abs(curve[0].mean_gap) < 1e-12);

  std::ostringstream out;
  write_gap_csv(out, curve);
  CHECK(out.str().rfind("m,mean_gap,mean_train_error,mean_pool_error\n40,", 0) == 0);
}

TEST_CASE("mmc pair loss") {
  const PairLoss loss = mmc_pair_loss(0.5);
  CHECK(loss(2.0, true) == 2.0);
  CHECK(loss(2.0, false) == -1.0);
}
