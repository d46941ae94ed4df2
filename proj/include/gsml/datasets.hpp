#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsml/graph_embed.hpp"
#include "gsml/random.hpp"
#include "gsml/surfaces.hpp"

namespace gsml {

/// Planted-partition graph: block sizes and a symmetric matrix of edge
/// probabilities between blocks. Node ids are 0..n-1 and node i's class is
/// class_names[block(i)]. Stray components are joined to the largest one by
/// one random edge each so the result is connected.
GraphDataset planted_partition_graph(const std::string& name, const std::vector<int>& sizes,
                                     const std::vector<std::string>& class_names,
                                     const Matrix& probabilities, std::uint64_t seed);

/// Stand-ins for the network datasets, with their node counts, class counts
/// and approximate edge counts and mixing:
///   football  115 nodes, 12 conferences (one of independents)
///   polbooks  105 nodes, 3 classes (l / c / n)
///   adjnoun   112 nodes, 2 classes, mostly adjective-noun edges
///   newsgroup 500 nodes, 20 classes nested in 6 topic groups
GraphDataset builtin_graph(const std::string& name, std::uint64_t seed);
std::vector<std::string> builtin_graph_names();

/// Two clusters on the helicoid base space, x2 uniform on [0, 4 pi]; cluster 0
/// has x1 in [0.5, 1.5] and cluster 1 has x1 in [-1.5, -0.5]. In R^3 they
/// form two interleaved helical bands.
BasePointSet helicoid_two_clusters(std::size_t per_cluster, std::uint64_t seed);

/// Labeled Gaussian data in R^d: label uniform in {0, 1}, mean +-separation
/// along the first axis, standard deviation along_sd on that axis and
/// across_sd on the others.
struct GaussianPairParams {
  int dim = 2;
  double separation = 1.0;
  double along_sd = 0.5;
  double across_sd = 2.0;
};

BasePointSet sample_gaussian_pairs(std::size_t n, Rng& rng, const GaussianPairParams& params = {});

}  // namespace gsml
