#include "gsml/metric_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gsml/csv.hpp"
#include "gsml/errors.hpp"
#include "gsml/parallel.hpp"

namespace gsml {

namespace {

using Index = Eigen::Index;

bool squared_terms(const Surface& surface) { return surface.kind() == SurfaceKind::kEuclidean; }

void check_inputs(const Surface& surface, const std::vector<Vector>& points,
                  const std::vector<int>& labels) {
  if (points.size() < 2) throw InputError("metric learning needs at least two points");
  if (labels.size() != points.size()) {
    throw InputError("label count " + std::to_string(labels.size()) + " does not match point count " +
                     std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != surface.base_dim()) {
      throw InputError("point " + std::to_string(i) + " has dimension " +
                       std::to_string(points[i].size()) + ", expected " +
                       std::to_string(surface.base_dim()));
    }
  }
}

/// Matrix of objective distances d_L over all pairs.
Matrix objective_distances(const Surface& surface, const LinearTransform& L,
                           const std::vector<Vector>& points, const GeodesicConfig& geo) {
  Matrix d = pairwise_distances(surface, points, &L, geo);
  if (squared_terms(surface)) d = d.cwiseProduct(d);
  return d;
}

double lmnn_from_distances(const Matrix& d, const std::vector<std::vector<std::size_t>>& targets,
                           const TripleSet& triples, double lambda) {
  double pull = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j : targets[i]) pull += d(static_cast<Index>(i), static_cast<Index>(j));
  }
  double push = 0.0;
  for (const Triple& t : triples.triples) {
    const double h = 1.0 + d(static_cast<Index>(t.i), static_cast<Index>(t.j)) -
                     d(static_cast<Index>(t.i), static_cast<Index>(t.l));
    if (h > 0.0) push += h;
  }
  return pull + lambda * push;
}

/// The fitting problem with everything that does not depend on L cached.
struct Problem {
  const Surface& surface;
  const std::vector<Vector>& points;
  const std::vector<int>& labels;
  ObjectiveKind kind;
  const OptimizerConfig& opt;
  const GeodesicConfig& geo;
  PairSets pairs;
  std::vector<std::vector<std::size_t>> targets;

  Problem(const Surface& s, const std::vector<Vector>& p, const std::vector<int>& y, ObjectiveKind k,
          const OptimizerConfig& o, const GeodesicConfig& g)
      : surface(s), points(p), labels(y), kind(k), opt(o), geo(g) {
    check_inputs(surface, points, labels);
    opt.validate();
    geo.validate();
    if (kind == ObjectiveKind::kMmc) {
      pairs = build_pair_sets(labels);
    } else {
      targets = select_target_neighbors(surface, points, labels, opt.n_target_neighbors, geo);
    }
  }

  double value_from(const Matrix& d) const {
    if (kind == ObjectiveKind::kMmc) {
      double pull = 0.0;
      for (const auto& [i, j] : pairs.similar) pull += d(static_cast<Index>(i), static_cast<Index>(j));
      double push = 0.0;
      for (const auto& [i, j] : pairs.dissimilar) {
        push += d(static_cast<Index>(i), static_cast<Index>(j));
      }
      return pull - opt.lambda * push;
    }
    // Hinge over the nearest max_imposters imposters of each (i, j). A sum of
    // the largest hinge terms is continuous in L, and the gradient below uses
    // the same set, so the line search sees a consistent objective.
    return lmnn_from_distances(d, targets, active_triples(targets, labels, d, opt.max_imposters), opt.lambda);
  }

  double value(const LinearTransform& L) const {
    return value_from(objective_distances(surface, L, points, geo));
  }

  /// Coefficients c_ij (i < j) with gradient = sum c_ij * grad d_ij.
  Matrix coefficients(const LinearTransform& L) const {
    const auto n = static_cast<Index>(points.size());
    Matrix c = Matrix::Zero(n, n);
    auto add = [&](std::size_t i, std::size_t j, double w) {
      c(static_cast<Index>(std::min(i, j)), static_cast<Index>(std::max(i, j))) += w;
    };
    if (kind == ObjectiveKind::kMmc) {
      for (const auto& [i, j] : pairs.similar) add(i, j, 1.0);
      for (const auto& [i, j] : pairs.dissimilar) add(i, j, -opt.lambda);
      return c;
    }
    const Matrix d = objective_distances(surface, L, points, geo);
    const TripleSet active = active_triples(targets, labels, d, opt.max_imposters);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      for (std::size_t j : targets[i]) add(i, j, 1.0);
    }
    for (const Triple& t : active.triples) {
      add(t.i, t.j, opt.lambda);
      add(t.i, t.l, -opt.lambda);
    }
    return c;
  }

  Matrix analytic_gradient(const LinearTransform& L) const {
    const Matrix c = coefficients(L);
    const int d = surface.base_dim();
    std::vector<Vector> u;
    u.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      u.push_back(L.apply(points[i]));
      if (!surface.in_domain(u.back())) {
        throw NumericalError("transform leaves domain at point " + std::to_string(i));
      }
    }
    std::vector<IndexPair> active;
    for (Index i = 0; i < c.rows(); ++i) {
      for (Index j = i + 1; j < c.cols(); ++j) {
        if (c(i, j) != 0.0) active.emplace_back(i, j);
      }
    }
    std::vector<Matrix> parts(active.size());
    const bool squared = squared_terms(surface);
    parallel_for(active.size(), [&](std::size_t p) {
      const auto [i, j] = active[p];
      Vector gu;
      Vector gv;
      if (squared) {
        gu = 2.0 * (u[i] - u[j]);
        gv = -gu;
      } else {
        DistanceWithGradient dg;
        try {
          dg = base_distance_gradient(surface, u[i], u[j], geo);
        } catch (const NumericalError& e) {
          throw NumericalError(std::string(e.what()) + " (pair " + std::to_string(i) + "," +
                               std::to_string(j) + ")");
        }
        gu = std::move(dg.grad_u);
        gv = std::move(dg.grad_v);
      }
      const double w = c(static_cast<Index>(i), static_cast<Index>(j));
      parts[p] = w * (gu * points[i].transpose() + gv * points[j].transpose());
    });
    Matrix g = Matrix::Zero(d, d);
    for (const Matrix& part : parts) g += part;
    return g;
  }

  Matrix finite_difference_gradient(const LinearTransform& L) const {
    const int d = surface.base_dim();
    Matrix g(d, d);
    for (int r = 0; r < d; ++r) {
      for (int k = 0; k < d; ++k) {
        const double h = opt.grad_step * (1.0 + std::abs(L.matrix(r, k)));
        LinearTransform plus = L;
        LinearTransform minus = L;
        plus.matrix(r, k) += h;
        minus.matrix(r, k) -= h;
        g(r, k) = (value(plus) - value(minus)) / (2.0 * h);
      }
    }
    return g;
  }

  Matrix gradient(const LinearTransform& L, GradientMode mode) const {
    if (mode == GradientMode::kFiniteDifference) return finite_difference_gradient(L);
    return analytic_gradient(L);
  }
};

}  // namespace

void OptimizerConfig::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw InputError("lambda must be finite and >= 0");
  if (max_iters < 0) throw InputError("max_iters must be >= 0");
  if (!(grad_step > 0.0)) throw InputError("grad_step must be > 0");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InputError("shrink must lie in (0, 1)");
  if (!(min_step > 0.0)) throw InputError("min_step must be > 0");
  if (!(rel_tol >= 0.0)) throw InputError("rel_tol must be >= 0");
  if (n_target_neighbors < 1) throw InputError("n_target_neighbors must be >= 1");
  if (max_imposters < 1) throw InputError("max_imposters must be >= 1");
}

double transformed_distance(const Surface& surface, const LinearTransform& L, const Vector& b_i,
                            const Vector& b_j, const GeodesicConfig& config) {
  L.validate(surface.base_dim());
  const Vector u = L.apply(b_i);
  const Vector v = L.apply(b_j);
  if (!surface.in_domain(u) || !surface.in_domain(v)) {
    throw NumericalError("transform leaves domain");
  }
  return base_distance(surface, u, v, config);
}

double objective_distance(const Surface& surface, const LinearTransform& L, const Vector& b_i,
                          const Vector& b_j, const GeodesicConfig& config) {
  const double r = transformed_distance(surface, L, b_i, b_j, config);
  return squared_terms(surface) ? r * r : r;
}

PairSets build_pair_sets(const std::vector<int>& labels) {
  PairSets out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      (labels[i] == labels[j] ? out.similar : out.dissimilar).emplace_back(i, j);
    }
  }
  return out;
}

double mmc_objective(const Surface& surface, const LinearTransform& L,
                     const std::vector<Vector>& points, const PairSets& pairs, double lambda,
                     const GeodesicConfig& config) {
  const Matrix d = objective_distances(surface, L, points, config);
  double pull = 0.0;
  for (const auto& [i, j] : pairs.similar) pull += d(static_cast<Index>(i), static_cast<Index>(j));
  double push = 0.0;
  for (const auto& [i, j] : pairs.dissimilar) push += d(static_cast<Index>(i), static_cast<Index>(j));
  return pull - lambda * push;
}

double lmnn_objective(const Surface& surface, const LinearTransform& L,
                      const std::vector<Vector>& points,
                      const std::vector<std::vector<std::size_t>>& targets,
                      const TripleSet& triples, double lambda, const GeodesicConfig& config) {
  if (targets.size() != points.size()) throw InputError("one target list per point is required");
  return lmnn_from_distances(objective_distances(surface, L, points, config), targets, triples,
                             lambda);
}

std::vector<std::vector<std::size_t>> select_target_neighbors(
    const Surface& surface, const std::vector<Vector>& points, const std::vector<int>& labels,
    int k_t, const GeodesicConfig& config) {
  check_inputs(surface, points, labels);
  if (k_t < 1) throw InputError("k_t must be >= 1");
  const Matrix d = pairwise_distances(surface, points, nullptr, config);
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> same;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && labels[j] == labels[i]) same.push_back(j);
    }
    std::stable_sort(same.begin(), same.end(), [&](std::size_t a, std::size_t b) {
      return d(static_cast<Index>(i), static_cast<Index>(a)) <
             d(static_cast<Index>(i), static_cast<Index>(b));
    });
    if (same.size() > static_cast<std::size_t>(k_t)) same.resize(static_cast<std::size_t>(k_t));
    out[i] = std::move(same);
  }
  return out;
}

TripleSet all_triples(const std::vector<std::vector<std::size_t>>& targets,
                      const std::vector<int>& labels) {
  TripleSet out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j : targets[i]) {
      for (std::size_t l = 0; l < labels.size(); ++l) {
        if (labels[l] != labels[i]) out.triples.push_back({i, j, l});
      }
    }
  }
  return out;
}

TripleSet active_triples(const std::vector<std::vector<std::size_t>>& targets,
                         const std::vector<int>& labels, const Matrix& objective_distances,
                         int cap) {
  const Matrix& d = objective_distances;
  TripleSet out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::vector<std::size_t> others;
    for (std::size_t l = 0; l < labels.size(); ++l) {
      if (labels[l] != labels[i]) others.push_back(l);
    }
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
      return d(static_cast<Index>(i), static_cast<Index>(a)) <
             d(static_cast<Index>(i), static_cast<Index>(b));
    });
    for (std::size_t j : targets[i]) {
      const double dij = d(static_cast<Index>(i), static_cast<Index>(j));
      int taken = 0;
      for (std::size_t l : others) {
        if (taken >= cap) break;
        // Sorted nearest first, so the first inactive imposter ends the list.
        if (!(1.0 + dij - d(static_cast<Index>(i), static_cast<Index>(l)) > 0.0)) break;
        out.triples.push_back({i, j, l});
        ++taken;
      }
    }
  }
  return out;
}

Matrix objective_gradient(const Surface& surface, const LinearTransform& L,
                          const std::vector<Vector>& points, const std::vector<int>& labels,
                          ObjectiveKind kind, const OptimizerConfig& opt,
                          const GeodesicConfig& geo, GradientMode mode) {
  const Problem problem(surface, points, labels, kind, opt, geo);
  L.validate(surface.base_dim());
  return problem.gradient(L, mode);
}

double objective_value(const Surface& surface, const LinearTransform& L,
                       const std::vector<Vector>& points, const std::vector<int>& labels,
                       ObjectiveKind kind, const OptimizerConfig& opt, const GeodesicConfig& geo) {
  const Problem problem(surface, points, labels, kind, opt, geo);
  L.validate(surface.base_dim());
  return problem.value(L);
}

FitResult fit(const Surface& surface, const std::vector<Vector>& points,
              const std::vector<int>& labels, ObjectiveKind kind, const OptimizerConfig& opt,
              const GeodesicConfig& geo) {
  const Problem problem(surface, points, labels, kind, opt, geo);
  const int d = surface.base_dim();
  const double target_norm = std::sqrt(static_cast<double>(d));
  const bool renormalize = kind == ObjectiveKind::kMmc;

  FitResult result;
  result.transform = LinearTransform::identity(d);
  double value = problem.value(result.transform);
  if (!std::isfinite(value)) throw NumericalError("objective is not finite at the identity");
  result.trace.push_back({0, value, 0.0});
  result.status = "max_iters";

  double step = opt.learning_rate;
  for (int iter = 1; iter <= opt.max_iters; ++iter) {
    const Matrix g = problem.gradient(result.transform, opt.gradient);
    if (!g.allFinite()) throw NumericalError("gradient is not finite at iteration " + std::to_string(iter));
    const double g_norm = g.norm();
    if (g_norm == 0.0) {
      result.converged = true;
      result.status = "zero gradient";
      break;
    }
    const Matrix direction = -g / g_norm;

    bool accepted = false;
    LinearTransform candidate;
    double candidate_value = 0.0;
    for (; step >= opt.min_step; step *= opt.shrink) {
      candidate.matrix = result.transform.matrix + step * direction;
      if (renormalize) {
        const double norm = candidate.matrix.norm();
        if (!(norm > 0.0)) continue;
        candidate.matrix *= target_norm / norm;
      }
      try {
        candidate_value = problem.value(candidate);
      } catch (const NumericalError&) {
        continue;  // step left the domain; shrink
      }
      if (candidate_value < value) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.converged = true;
      if (iter == 1) {
        result.no_descent = true;
        result.status = "no descent direction";
      } else {
        result.status = "line search exhausted";
      }
      break;
    }
    const double decrease = value - candidate_value;
    result.transform = std::move(candidate);
    value = candidate_value;
    result.trace.push_back({iter, value, step});
    if (decrease <= opt.rel_tol * std::max(std::abs(value), 1e-12)) {
      result.converged = true;
      result.status = "converged";
      break;
    }
    // Let the step grow back after shrinking.
    step = std::min(opt.learning_rate, 2.0 * step);
  }
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,objective,step\n";
  for (const TraceRow& row : trace) {
    out << row.iteration << ',' << csv::format(row.value) << ',' << csv::format(row.step) << '\n';
  }
}

}  // namespace gsml
