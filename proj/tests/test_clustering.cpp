#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gsml/clustering.hpp"
#include "gsml/errors.hpp"
#include "gsml/neighbors_eval.hpp"
#include "gsml/parallel.hpp"
#include "gsml/random.hpp"

using namespace gsml;

namespace {

Matrix euclidean_matrix(const std::vector<Vector>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (pts[i] - pts[j]).norm();
  }
  return d;
}

std::vector<Vector> random_points(Rng& rng, int n, int dim) {
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) pts.push_back(rng.normal_vector(dim));
  return pts;
}

// Sum over clusters of squared distances to the cluster mean.
double centroid_cost(const std::vector<Vector>& pts, const std::vector<int>& labels) {
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    Vector mean = Vector::Zero(pts.front().size());
    int count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (labels[i] == c) {
        mean += pts[i];
        ++count;
      }
    }
    if (count == 0) continue;
    mean /= count;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (labels[i] == c) total += (pts[i] - mean).squaredNorm();
    }
  }
  return total;
}

// Exhaustive minimum over all 2-partitions (point 0 fixed in cluster 0).
double exhaustive_two_cluster_minimum(const Matrix& dist) {
  const auto n = static_cast<std::size_t>(dist.rows());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
    std::vector<int> labels(n, 0);
    for (std::size_t i = 1; i < n; ++i) labels[i] = static_cast<int>((mask >> (i - 1)) & 1U);
    best = std::min(best, cost_of(labels, dist));
  }
  return best;
}

}  // namespace

TEST_CASE("counting examples") {
  CHECK(counting({0, 1, 2}, 1) == 1);
  CHECK(counting({3, 3, 3, 3}, 2) == 4);
  CHECK(counting({0, 0, 1}, 0) == 2);
  CHECK_THROWS_AS(counting({0}, 1), InputError);
}

TEST_CASE("cost examples") {
  Matrix d(3, 3);
  d << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  CHECK(cost_of({0, 1, 2}, d) == 0.0);
  Matrix line(2, 2);
  line << 0, 2, 2, 0;
  CHECK(cost_of({0, 0}, line, true) == 2.0);
}

TEST_CASE("pairwise cost equals the centroid form on squared distances") {
  Rng rng(100);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 10;
    const int k = 1 + static_cast<int>(rng.below(4));
    const auto pts = random_points(rng, n, 1 + static_cast<int>(rng.below(3)));
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    const double pairwise = cost_of(labels, euclidean_matrix(pts), true);
    worst = std::max(worst, std::abs(pairwise - centroid_cost(pts, labels)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("incremental move costs match recomputation") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const int n = 12;
    const int k = 3;
    const Matrix d = euclidean_matrix(random_points(rng, n, 2));
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng.below(k));
    PartitionCost state(d, labels, k);
    CHECK(std::abs(state.cost() - cost_of(labels, d)) < 1e-12);
    for (int step = 0; step < 30; ++step) {
      const std::size_t i = rng.below(n);
      const int c = static_cast<int>(rng.below(k));
      std::vector<int> moved = state.labels();
      moved[i] = c;
      // cost_of renumbers nothing, so an emptied cluster just contributes 0.
      CHECK(std::abs(state.cost_if_moved(i, c) - cost_of(moved, d)) < 1e-9);
      state.move(i, c);
      CHECK(std::abs(state.cost() - cost_of(moved, d)) < 1e-9);
    }
  }
}

TEST_CASE("relabeling clusters leaves the cost unchanged") {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const int n = 15;
    const Matrix d = euclidean_matrix(random_points(rng, n, 2));
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng.below(3));
    std::vector<int> perm = {0, 1, 2};
    rng.shuffle(perm.begin(), perm.end());
    std::vector<int> relabeled(n);
    for (int i = 0; i < n; ++i) relabeled[i] = perm[labels[i]];
    CHECK(std::abs(cost_of(labels, d) - cost_of(relabeled, d)) < 1e-12);
  }
}

TEST_CASE("k = 1 puts everything in one cluster") {
  Rng rng(2);
  const Matrix d = euclidean_matrix(random_points(rng, 9, 2));
  KMeansConfig c;
  c.k = 1;
  const ClusterAssignment a = kmeans_fit(d, c);
  CHECK(a.labels == std::vector<int>(9, 0));
  CHECK(a.passes == 1);
  CHECK(a.cost == doctest::Approx(cost_of(a.labels, d)).epsilon(1e-15));
}

TEST_CASE("two separated blobs are recovered") {
  Rng rng(5);
  std::vector<Vector> pts;
  std::vector<int> truth;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 10; ++i) {
      Vector p = rng.normal_vector(2, 0.3);
      p[0] += 50.0 * c;
      pts.push_back(p);
      truth.push_back(c);
    }
  }
  const Matrix d = euclidean_matrix(pts);
  KMeansConfig c;
  c.k = 2;
  c.seed = 3;
  const ClusterAssignment a = kmeans_fit(d, c);
  CHECK(nmi(a.labels, truth) == doctest::Approx(1.0));

  // Brute force confirms the true partition is the global minimum here.
  const double truth_cost = cost_of(truth, d);
  CHECK(exhaustive_two_cluster_minimum(d) == doctest::Approx(truth_cost));
  CHECK(a.cost == doctest::Approx(truth_cost));
}

TEST_CASE("k-means matches the exhaustive optimum on small instances") {
  Rng rng(2718);
  int matched = 0;
  for (int t = 0; t < 50; ++t) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const Matrix d = euclidean_matrix(random_points(rng, n, 2));
    const double optimum = exhaustive_two_cluster_minimum(d);
    KMeansConfig c;
    c.k = 2;
    c.seed = static_cast<std::uint64_t>(t);
    const ClusterAssignment a = kmeans_fit(d, c);
    CHECK(a.cost >= optimum - 1e-12);
    if (a.cost <= optimum + 1e-9) ++matched;
  }
  CHECK(matched >= 45);
}

TEST_CASE("cost trace decreases strictly on every accepted move") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const Matrix d = euclidean_matrix(random_points(rng, 40, 3));
    KMeansConfig c;
    c.k = 4;
    c.seed = static_cast<std::uint64_t>(t);
    const ClusterAssignment a = kmeans_fit(d, c);
    REQUIRE(!a.cost_trace.empty());
    for (std::size_t s = 1; s < a.cost_trace.size(); ++s) CHECK(a.cost_trace[s] < a.cost_trace[s - 1]);
    CHECK(std::abs(a.cost_trace.back() - a.cost) < 1e-9);
    for (int y : a.labels) CHECK((y >= 0 && y < 4));
  }
}

TEST_CASE("k-means is reproducible and thread independent") {
  Rng rng(8);
  const Matrix d = euclidean_matrix(random_points(rng, 30, 2));
  KMeansConfig c;
  c.k = 3;
  c.seed = 99;
  const unsigned before = thread_count();
  set_thread_count(1);
  const ClusterAssignment a = kmeans_fit(d, c);
  set_thread_count(4);
  const ClusterAssignment b = kmeans_fit(d, c);
  set_thread_count(before);
  CHECK(a.labels == b.labels);
  CHECK(a.cost == b.cost);
}

TEST_CASE("bad inputs are rejected") {
  Matrix d = Matrix::Zero(3, 3);
  KMeansConfig c;
  c.k = 4;
  CHECK_THROWS_AS(kmeans_fit(d, c), InputError);
  c.k = 0;
  CHECK_THROWS_AS(kmeans_fit(d, c), InputError);
  c.k = 2;
  d(0, 1) = 1.0;
  CHECK_THROWS_WITH_AS(kmeans_fit(d, c), doctest::Contains("not symmetric"), InputError);
  d(1, 0) = 1.0;
  d(2, 2) = 0.5;
  CHECK_THROWS_AS(kmeans_fit(d, c), InputError);
}

TEST_CASE("assignment csv roundtrip") {
  const std::vector<int> labels = {0, 2, 1, 1, 0};
  std::ostringstream out;
  write_assignment_csv(out, labels);
  CHECK(out.str().rfind("index,cluster\n0,0\n1,2\n", 0) == 0);
  const auto path = std::filesystem::temp_directory_path() / "gsml_assignment_roundtrip.csv";
  {
    std::ofstream f(path);
    f << out.str();
  }
  CHECK(read_assignment_csv(path) == labels);
  std::filesystem::remove(path);
}
