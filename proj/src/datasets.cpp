#include "gsml/datasets.hpp"

#include <numbers>

#include "gsml/errors.hpp"
#include "gsml/seeding.hpp"

namespace gsml {

namespace {

GraphDataset football(std::uint64_t seed) {
  // Conference 5 plays as the independents: few games among themselves.
  const std::vector<int> sizes = {9, 8, 11, 12, 10, 5, 13, 8, 10, 12, 7, 10};
  const int k = static_cast<int>(sizes.size());
  Matrix p(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (a == b) {
        p(a, b) = std::min(1.0, 7.0 / (sizes[static_cast<std::size_t>(a)] - 1));
      } else {
        p(a, b) = 0.035;
      }
    }
  }
  p(5, 5) = 0.1;
  for (int b = 0; b < k; ++b) {
    if (b != 5) p(5, b) = p(b, 5) = 0.08;
  }
  std::vector<std::string> names;
  for (int c = 0; c < k; ++c) names.push_back(std::to_string(c));
  return planted_partition_graph("football", sizes, names, p, seed);
}

GraphDataset polbooks(std::uint64_t seed) {
  Matrix p(3, 3);
  p << 0.15, 0.01, 0.08,
       0.01, 0.14, 0.09,
       0.08, 0.09, 0.20;
  return planted_partition_graph("polbooks", {43, 49, 13}, {"l", "c", "n"}, p, seed);
}

GraphDataset adjnoun(std::uint64_t seed) {
  Matrix p(2, 2);
  p << 0.035, 0.10,
       0.10, 0.038;
  return planted_partition_graph("adjnoun", {58, 54}, {"0", "1"}, p, seed);
}

GraphDataset newsgroup(std::uint64_t seed) {
  const std::vector<int> group_of = {0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 4, 5, 5, 5};
  const int k = static_cast<int>(group_of.size());
  Matrix p(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      p(a, b) = a == b ? 0.25 : (group_of[static_cast<std::size_t>(a)] == group_of[static_cast<std::size_t>(b)] ? 0.04 : 0.005);
    }
  }
  std::vector<std::string> names;
  for (int c = 0; c < k; ++c) names.push_back(std::to_string(c));
  return planted_partition_graph("newsgroup", std::vector<int>(static_cast<std::size_t>(k), 25), names, p, seed);
}

}  // namespace

GraphDataset planted_partition_graph(const std::string& name, const std::vector<int>& sizes,
                                     const std::vector<std::string>& class_names,
                                     const Matrix& probabilities, std::uint64_t seed) {
  const auto k = static_cast<Eigen::Index>(sizes.size());
  if (sizes.empty() || class_names.size() != sizes.size() || probabilities.rows() != k ||
      probabilities.cols() != k) {
    throw InputError("planted partition: sizes, class names and probabilities disagree");
  }
  GraphDataset g;
  g.name = name;
  std::vector<int> block;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (sizes[b] < 1) throw InputError("planted partition: empty block");
    for (int m = 0; m < sizes[b]; ++m) {
      g.ids.push_back(static_cast<long long>(g.ids.size()));
      g.names.push_back(name + "_" + std::to_string(g.ids.size() - 1));
      g.classes.push_back(class_names[b]);
      block.push_back(static_cast<int>(b));
    }
  }
  Rng rng(combine_seed(seed, fnv1a64(name)));
  const std::size_t n = g.ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < probabilities(block[i], block[j])) g.edges.emplace_back(i, j);
    }
  }
  g.normalize();
  auto components = connected_components(g);
  for (std::size_t c = 1; c < components.size(); ++c) {
    const auto& main = components.front();
    const std::size_t from = components[c][rng.below(components[c].size())];
    const std::size_t to = main[rng.below(main.size())];
    g.edges.emplace_back(from, to);
  }
  g.normalize();
  return g;
}

GraphDataset builtin_graph(const std::string& name, std::uint64_t seed) {
  if (name == "football") return football(seed);
  if (name == "polbooks") return polbooks(seed);
  if (name == "adjnoun") return adjnoun(seed);
  if (name == "newsgroup") return newsgroup(seed);
  throw InputError("unknown built-in graph '" + name + "' (known: football, polbooks, adjnoun, newsgroup)");
}

std::vector<std::string> builtin_graph_names() { return {"football", "polbooks", "adjnoun", "newsgroup"}; }

BasePointSet helicoid_two_clusters(std::size_t per_cluster, std::uint64_t seed) {
  if (per_cluster < 1) throw InputError("helicoid_two_clusters needs at least one point per cluster");
  Rng rng(combine_seed(seed, fnv1a64("helicoid-two-clusters")));
  BasePointSet out;
  out.labels.emplace();
  for (int c = 0; c < 2; ++c) {
    for (std::size_t m = 0; m < per_cluster; ++m) {
      const double x1 = c == 0 ? rng.uniform(0.5, 1.5) : rng.uniform(-1.5, -0.5);
      const double x2 = rng.uniform(0.0, 4.0 * std::numbers::pi);
      out.points.push_back((Vector(2) << x1, x2).finished());
      out.labels->push_back(c);
    }
  }
  return out;
}

BasePointSet sample_gaussian_pairs(std::size_t n, Rng& rng, const GaussianPairParams& params) {
  if (params.dim < 1) throw InputError("gaussian pairs: dim must be >= 1");
  BasePointSet out;
  out.labels.emplace();
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng.below(2));
    Vector b(params.dim);
    b[0] = (y == 0 ? -params.separation : params.separation) + params.along_sd * rng.normal();
    for (int k = 1; k < params.dim; ++k) b[k] = params.across_sd * rng.normal();
    out.points.push_back(std::move(b));
    out.labels->push_back(y);
  }
  return out;
}

}  // namespace gsml
