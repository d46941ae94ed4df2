#include "gsml/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gsml/csv.hpp"
#include "gsml/errors.hpp"
#include "gsml/parallel.hpp"
#include "gsml/random.hpp"
#include "gsml/seeding.hpp"

namespace gsml {

namespace {

using Index = Eigen::Index;

ClusterAssignment run_restart(const Matrix& dist, const KMeansConfig& config, int restart) {
  const std::size_t n = static_cast<std::size_t>(dist.rows());
  Rng rng(combine_seed(config.seed, static_cast<std::uint64_t>(restart)));
  std::vector<int> labels(n);
  for (auto& y : labels) y = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.k)));

  PartitionCost state(dist, std::move(labels), config.k);
  ClusterAssignment out;
  out.k = config.k;
  out.cost_trace.push_back(state.cost());
  int pass = 0;
  while (pass < config.max_passes) {
    ++pass;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int current = state.labels()[i];
      const std::vector<double> costs = state.costs_if_moved(i);
      int best = current;
      // Require a decrease well above roundoff so that the recomputed
      // running cost is certain to drop.
      double best_cost = state.cost() - 1e-12 * std::max(1.0, std::abs(state.cost()));
      for (int c = 0; c < config.k; ++c) {
        if (c != current && costs[static_cast<std::size_t>(c)] < best_cost) {
          best = c;
          best_cost = costs[static_cast<std::size_t>(c)];
        }
      }
      if (best == current) continue;
      const double before = state.cost();
      state.move(i, best);
      if (!(state.cost() < before)) {
        throw NumericalError("k-means cost did not decrease after an accepted move");
      }
      out.cost_trace.push_back(state.cost());
      changed = true;
    }
    if (!changed) break;
  }
  out.labels = state.labels();
  out.passes = pass;
  out.cost = cost_of(out.labels, dist);
  return out;
}

}  // namespace

int counting(const std::vector<int>& labels, std::size_t i) {
  if (i >= labels.size()) throw InputError("counting: index out of range");
  int count = 0;
  for (int y : labels) count += y == labels[i] ? 1 : 0;
  return count;
}

double cost_of(const std::vector<int>& labels, const Matrix& dist, bool squared) {
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(dist.rows()) != n || static_cast<std::size_t>(dist.cols()) != n) {
    throw InputError("cost_of: distance matrix does not match the assignment size");
  }
  int k = 0;
  for (int y : labels) {
    if (y < 0) throw InputError("cost_of: negative cluster label");
    k = std::max(k, y + 1);
  }
  std::vector<double> within(static_cast<std::size_t>(k), 0.0);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++sizes[static_cast<std::size_t>(labels[i])];
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[i] != labels[j]) continue;
      const double r = dist(static_cast<Index>(i), static_cast<Index>(j));
      within[static_cast<std::size_t>(labels[i])] += squared ? r * r : r;
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < within.size(); ++c) {
    if (sizes[c] > 0) total += within[c] / (2.0 * sizes[c]);
  }
  return total;
}

PartitionCost::PartitionCost(const Matrix& dist, std::vector<int> labels, int k)
    : dist_(dist), labels_(std::move(labels)), sizes_(static_cast<std::size_t>(k), 0),
      within_(static_cast<std::size_t>(k), 0.0) {
  if (k < 1) throw InputError("k must be >= 1");
  if (static_cast<std::size_t>(dist.rows()) != labels_.size()) {
    throw InputError("distance matrix does not match the assignment size");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int y = labels_[i];
    if (y < 0 || y >= k) throw InputError("cluster label out of range at point " + std::to_string(i));
    ++sizes_[static_cast<std::size_t>(y)];
    for (std::size_t j = 0; j < labels_.size(); ++j) {
      if (labels_[j] == y) within_[static_cast<std::size_t>(y)] += dist_(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  for (std::size_t c = 0; c < sizes_.size(); ++c) cost_ += cluster_term(within_[c], sizes_[c]);
}

std::vector<double> PartitionCost::sums_to_clusters(std::size_t i) const {
  std::vector<double> s(sizes_.size(), 0.0);
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    s[static_cast<std::size_t>(labels_[j])] += dist_(static_cast<Index>(i), static_cast<Index>(j));
  }
  return s;
}

std::vector<double> PartitionCost::costs_if_moved(std::size_t i) const {
  const std::vector<double> s = sums_to_clusters(i);
  const auto a = static_cast<std::size_t>(labels_[i]);
  const double old_a = cluster_term(within_[a], sizes_[a]);
  const double new_a = cluster_term(within_[a] - 2.0 * s[a], sizes_[a] - 1);
  std::vector<double> out(sizes_.size(), cost_);
  for (std::size_t b = 0; b < sizes_.size(); ++b) {
    if (b == a) continue;
    const double old_b = cluster_term(within_[b], sizes_[b]);
    const double new_b = cluster_term(within_[b] + 2.0 * s[b], sizes_[b] + 1);
    out[b] = cost_ - old_a - old_b + new_a + new_b;
  }
  return out;
}

double PartitionCost::cost_if_moved(std::size_t i, int c) const {
  if (c < 0 || static_cast<std::size_t>(c) >= sizes_.size()) throw InputError("cluster out of range");
  return costs_if_moved(i)[static_cast<std::size_t>(c)];
}

void PartitionCost::move(std::size_t i, int c) {
  const auto a = static_cast<std::size_t>(labels_[i]);
  const auto b = static_cast<std::size_t>(c);
  if (a == b) return;
  const std::vector<double> s = sums_to_clusters(i);
  cost_ -= cluster_term(within_[a], sizes_[a]) + cluster_term(within_[b], sizes_[b]);
  within_[a] -= 2.0 * s[a];
  within_[b] += 2.0 * s[b];
  --sizes_[a];
  ++sizes_[b];
  if (sizes_[a] == 0) within_[a] = 0.0;  // shed accumulated roundoff
  cost_ += cluster_term(within_[a], sizes_[a]) + cluster_term(within_[b], sizes_[b]);
  labels_[i] = c;
}

void KMeansConfig::validate(std::size_t n) const {
  if (k < 1) throw InputError("k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw InputError("k = " + std::to_string(k) + " exceeds the number of points " + std::to_string(n));
  }
  if (restarts < 1) throw InputError("restarts must be >= 1");
  if (max_passes < 1) throw InputError("max_passes must be >= 1");
}

void validate_distance_matrix(const Matrix& dist) {
  if (dist.rows() != dist.cols()) throw InputError("distance matrix is not square");
  if (dist.rows() == 0) throw InputError("distance matrix is empty");
  for (Index i = 0; i < dist.rows(); ++i) {
    if (dist(i, i) != 0.0) throw InputError("distance matrix diagonal is nonzero at row " + std::to_string(i));
    for (Index j = 0; j < dist.cols(); ++j) {
      const double v = dist(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw InputError("distance matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") is negative or not finite");
      }
      if (v != dist(j, i)) {
        throw InputError("distance matrix is not symmetric at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      }
    }
  }
}

ClusterAssignment kmeans_fit(const Matrix& dist_in, const KMeansConfig& config) {
  validate_distance_matrix(dist_in);
  config.validate(static_cast<std::size_t>(dist_in.rows()));
  const Matrix dist = config.squared ? Matrix(dist_in.cwiseProduct(dist_in)) : dist_in;
  std::vector<ClusterAssignment> runs(static_cast<std::size_t>(config.restarts));
  parallel_for(runs.size(), [&](std::size_t r) { runs[r] = run_restart(dist, config, static_cast<int>(r)); });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].cost < runs[best].cost) best = r;
  }
  return std::move(runs[best]);
}

void write_assignment_csv(std::ostream& out, const std::vector<int>& labels) {
  out << "index,cluster\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

std::vector<int> read_assignment_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path);
  std::vector<int> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    if (row.size() != 2) throw InputError(path.string() + ":" + std::to_string(line) + ": expected 2 fields");
    if (row[0] == "index") continue;
    const long long idx = csv::to_integer(row[0], line);
    if (idx != static_cast<long long>(labels.size())) {
      throw InputError(path.string() + ":" + std::to_string(line) + ": indices must be 0,1,2,...");
    }
    labels.push_back(static_cast<int>(csv::to_integer(row[1], line)));
  }
  return labels;
}

}  // namespace gsml
