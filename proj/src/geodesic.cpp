#include "gsml/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>

#include "gsml/csv.hpp"
#include "gsml/errors.hpp"
#include "gsml/parallel.hpp"
#include "gsml/quadrature.hpp"
#include "gsml/random.hpp"
#include "gsml/seeding.hpp"

namespace gsml {

namespace {

bool lexicographically_less(const Vector& a, const Vector& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (b[k] < a[k]) return false;
  }
  return false;
}

double segment_length_with(const Surface& surface, const Vector& a_in, const Vector& b_in,
                           const GaussLegendre& rule) {
  // Canonical orientation makes sigma(a, b) and sigma(b, a) identical bits.
  const bool swap = lexicographically_less(b_in, a_in);
  const Vector& a = swap ? b_in : a_in;
  const Vector& b = swap ? a_in : b_in;
  const auto d = static_cast<std::size_t>(a.size());

  thread_local std::vector<double> scratch;
  scratch.resize(2 * d);
  std::span<double> point(scratch.data(), d);
  std::span<double> velocity(scratch.data() + d, d);
  bool moving = false;
  for (std::size_t k = 0; k < d; ++k) {
    velocity[k] = b[static_cast<Eigen::Index>(k)] - a[static_cast<Eigen::Index>(k)];
    moving = moving || velocity[k] != 0.0;
  }
  if (!moving) return 0.0;

  double total = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    for (std::size_t k = 0; k < d; ++k) {
      point[k] = a[static_cast<Eigen::Index>(k)] + t * velocity[k];
    }
    const double s2 = surface.speed_squared(point, velocity);
    if (s2 < -1e-6) {
      throw NumericalError("non-lengthlike segment on " + surface.name() +
                           ": squared speed " + csv::format(s2));
    }
    total += rule.weights[q] * std::sqrt(std::max(s2, 0.0));
  }
  return total;
}

// Writes a uniform draw from ball(center, radius) into out.
void sample_ball(Rng& rng, const Vector& center, double radius, Vector& out) {
  const auto d = center.size();
  out.resize(d);
  double n2 = 0.0;
  while (!(n2 > 0.0)) {
    for (Eigen::Index k = 0; k < d; ++k) out[k] = rng.normal();
    n2 = out.squaredNorm();
  }
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  const double scale = r / std::sqrt(n2);
  for (Eigen::Index k = 0; k < d; ++k) out[k] = center[k] + scale * out[k];
}

// Draws from ball(center, radius) intersected with the domain; gives up after
// `limit` consecutive rejections.
void sample_in_domain(const Surface& surface, Rng& rng, const Vector& center, double radius,
                      int limit, Vector& out) {
  for (int attempt = 0; attempt < limit; ++attempt) {
    sample_ball(rng, center, radius, out);
    if (surface.in_domain(out)) return;
  }
  throw NumericalError("disconnected or out-of-domain: no admissible sample near a waypoint of " +
                       surface.name());
}

std::vector<Vector> initial_waypoints(const Surface& surface, const Vector& a, const Vector& b,
                                      const GeodesicConfig& config, Rng& rng) {
  const int n = config.n_intermediate;
  std::vector<Vector> w;
  w.reserve(static_cast<std::size_t>(n) + 2);
  w.push_back(a);
  const double spacing = (b - a).norm() / (n + 1);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / (n + 1);
    Vector p = a + t * (b - a);
    if (!surface.in_domain(p)) {
      // Non-convex base space: perturb the linear guess into the domain,
      // widening the ball while nothing admissible turns up.
      const Vector guess = p;
      double radius = std::max(spacing, 1e-12);
      for (int widen = 0;; ++widen, radius *= 2.0) {
        try {
          sample_in_domain(surface, rng, guess, radius, 100 * config.n_samples, p);
          break;
        } catch (const NumericalError&) {
          if (widen == 8) throw;
        }
      }
    }
    w.push_back(std::move(p));
  }
  w.push_back(b);
  return w;
}

double sum(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

void check_endpoint(const Surface& surface, const Vector& p, const char* which) {
  if (p.size() != surface.base_dim()) {
    throw InputError(std::string(which) + " endpoint has dimension " + std::to_string(p.size()) +
                     ", expected " + std::to_string(surface.base_dim()));
  }
  if (!surface.in_domain(p)) {
    throw NumericalError(std::string(which) + " endpoint lies outside the base space of " +
                         surface.name());
  }
}

Vector end_segment_gradient(const Surface& surface, const Vector& end, const Vector& neighbor,
                            const GaussLegendre& rule) {
  Vector g(end.size());
  Vector probe = end;
  for (Eigen::Index k = 0; k < end.size(); ++k) {
    const double step = 1e-6 * (1.0 + std::abs(end[k]));
    probe[k] = end[k] + step;
    const double up = segment_length_with(surface, probe, neighbor, rule);
    probe[k] = end[k] - step;
    const double down = segment_length_with(surface, probe, neighbor, rule);
    probe[k] = end[k];
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

std::vector<Vector> transformed(const Surface& surface, const std::vector<Vector>& points,
                                const LinearTransform* transform) {
  std::vector<Vector> out;
  out.reserve(points.size());
  if (transform) transform->validate(surface.base_dim());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != surface.base_dim()) {
      throw InputError("point " + std::to_string(i) + " has dimension " +
                       std::to_string(points[i].size()) + ", expected " +
                       std::to_string(surface.base_dim()));
    }
    Vector u = transform ? transform->apply(points[i]) : points[i];
    if (!surface.in_domain(u)) {
      throw NumericalError("transform leaves domain at point " + std::to_string(i));
    }
    out.push_back(std::move(u));
  }
  return out;
}

template <typename Fn>
double annotated(std::size_t i, std::size_t j, Fn&& fn) {
  const auto where = " (pair " + std::to_string(i) + "," + std::to_string(j) + ")";
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError(e.what() + where);
  } catch (const InputError& e) {
    throw InputError(e.what() + where);
  }
}

}  // namespace

void GeodesicConfig::validate() const {
  if (n_intermediate < 0) throw InputError("n_intermediate must be >= 0");
  if (n_samples < 1) throw InputError("n_samples must be >= 1");
  if (quadrature_points < 1) throw InputError("quadrature_points must be >= 1");
  if (max_sweeps < 1) throw InputError("max_sweeps must be >= 1");
  if (!(rel_tol > 0.0)) throw InputError("rel_tol must be > 0");
  if (patience < 1) throw InputError("patience must be >= 1");
}

double PathPolyline::recompute_length(const Surface& surface, int quadrature_points) const {
  const auto& rule = gauss_legendre(quadrature_points);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    total += segment_length_with(surface, waypoints[i], waypoints[i + 1], rule);
  }
  return total;
}

double segment_length(const Surface& surface, const Vector& a, const Vector& b,
                      int quadrature_points) {
  check_endpoint(surface, a, "first");
  check_endpoint(surface, b, "second");
  return segment_length_with(surface, a, b, gauss_legendre(quadrature_points));
}

RefineResult refine_base_path(const Surface& surface, const Vector& a, const Vector& b,
                              const GeodesicConfig& config, std::uint64_t stream_seed) {
  config.validate();
  check_endpoint(surface, a, "first");
  check_endpoint(surface, b, "second");
  const auto& rule = gauss_legendre(config.quadrature_points);
  Rng rng(stream_seed);

  RefineResult result;
  PathPolyline& path = result.path;
  path.waypoints = initial_waypoints(surface, a, b, config, rng);
  auto& w = path.waypoints;
  auto& seg = path.segment_lengths;
  seg.resize(w.size() - 1);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) seg[i] = segment_length_with(surface, w[i], w[i + 1], rule);
  double total = sum(seg);
  if (config.record_trace) result.length_trace.push_back(total);

  const int n = config.n_intermediate;
  const int limit = 100 * config.n_samples;
  Vector candidate(surface.base_dim());
  Vector best_point(surface.base_dim());
  std::vector<double> sweep_totals{total};
  for (int sweep = 0; sweep < config.max_sweeps && n > 0; ++sweep) {
    for (int i = 1; i <= n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double radius =
          2.0 * std::max((w[ui] - w[ui - 1]).norm(), (w[ui] - w[ui + 1]).norm());
      if (!(radius > 0.0)) continue;
      double best = std::numeric_limits<double>::infinity();
      double best_left = 0.0;
      double best_right = 0.0;
      for (int j = 0; j < config.n_samples; ++j) {
        sample_in_domain(surface, rng, w[ui], radius, limit, candidate);
        const double left = segment_length_with(surface, w[ui - 1], candidate, rule);
        if (!(left < best)) continue;  // right >= 0, so this cannot win
        const double right = segment_length_with(surface, candidate, w[ui + 1], rule);
        if (left + right < best) {
          best = left + right;
          best_left = left;
          best_right = right;
          best_point = candidate;
        }
      }
      if (best < seg[ui - 1] + seg[ui]) {
        w[ui] = best_point;
        seg[ui - 1] = best_left;
        seg[ui] = best_right;
        const double updated = sum(seg);
        if (updated > total + 1e-12) {
          throw NumericalError("path refinement increased the total length");
        }
        total = updated;
        ++result.accepted_moves;
        if (config.record_trace) result.length_trace.push_back(total);
      }
    }
    result.sweeps = sweep + 1;
    sweep_totals.push_back(total);
    if (result.sweeps >= config.patience) {
      const double before = sweep_totals[sweep_totals.size() - 1 - static_cast<std::size_t>(config.patience)];
      if (!(before > 0.0) || (before - total) < config.rel_tol * before) break;
    }
  }
  path.length = total;
  return result;
}

std::uint64_t pair_seed(std::uint64_t seed, const Vector& a, const Vector& b) {
  const bool swap = lexicographically_less(b, a);
  const Vector& first = swap ? b : a;
  const Vector& second = swap ? a : b;
  return hash_coordinates(hash_coordinates(mix64(seed), first), second);
}

RefineResult refine_path(const Surface& surface, const Vector& x, const Vector& y,
                         const GeodesicConfig& config) {
  const Vector a = surface.inverse_map(x);
  const Vector b = surface.inverse_map(y);
  return refine_base_path(surface, a, b, config, pair_seed(config.seed, a, b));
}

double distance(const Surface& surface, const Vector& x, const Vector& y,
                const GeodesicConfig& config) {
  return base_distance(surface, surface.inverse_map(x), surface.inverse_map(y), config);
}

double base_distance(const Surface& surface, const Vector& a, const Vector& b,
                     const GeodesicConfig& config) {
  check_endpoint(surface, a, "first");
  check_endpoint(surface, b, "second");
  if (a == b) return 0.0;
  if (surface.has_closed_form()) return surface.closed_form_base_distance(a, b);
  // Refine in canonical orientation so the result is symmetric bit-for-bit.
  const bool swap = lexicographically_less(b, a);
  const Vector& first = swap ? b : a;
  const Vector& second = swap ? a : b;
  return refine_base_path(surface, first, second, config, pair_seed(config.seed, a, b)).path.length;
}

DistanceWithGradient base_distance_gradient(const Surface& surface, const Vector& a,
                                            const Vector& b, const GeodesicConfig& config) {
  check_endpoint(surface, a, "first");
  check_endpoint(surface, b, "second");
  DistanceWithGradient out;
  if (a == b) {
    out.grad_u = Vector::Zero(a.size());
    out.grad_v = Vector::Zero(b.size());
    return out;
  }
  if (surface.has_closed_form()) {
    out.value = surface.closed_form_base_distance(a, b, &out.grad_u, &out.grad_v);
    return out;
  }
  const bool swap = lexicographically_less(b, a);
  const Vector& first = swap ? b : a;
  const Vector& second = swap ? a : b;
  const RefineResult refined =
      refine_base_path(surface, first, second, config, pair_seed(config.seed, a, b));
  const auto& w = refined.path.waypoints;
  const auto& rule = gauss_legendre(config.quadrature_points);
  Vector g_first = end_segment_gradient(surface, w.front(), w[1], rule);
  Vector g_second = end_segment_gradient(surface, w.back(), w[w.size() - 2], rule);
  out.value = refined.path.length;
  out.grad_u = swap ? std::move(g_second) : std::move(g_first);
  out.grad_v = swap ? std::move(g_first) : std::move(g_second);
  return out;
}

Matrix pairwise_distances(const Surface& surface, const std::vector<Vector>& points,
                          const LinearTransform* transform, const GeodesicConfig& config) {
  if (points.empty()) throw InputError("pairwise_distances needs at least one point");
  config.validate();
  const std::vector<Vector> u = transformed(surface, points, transform);
  const auto n = u.size();
  Matrix dist = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double value = annotated(i, j, [&] { return base_distance(surface, u[i], u[j], config); });
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    }
  });
  return dist;
}

Matrix cross_distances(const Surface& surface, const std::vector<Vector>& rows,
                       const std::vector<Vector>& cols, const LinearTransform* transform,
                       const GeodesicConfig& config) {
  config.validate();
  const std::vector<Vector> ur = transformed(surface, rows, transform);
  const std::vector<Vector> uc = transformed(surface, cols, transform);
  Matrix dist(static_cast<Eigen::Index>(ur.size()), static_cast<Eigen::Index>(uc.size()));
  parallel_for(ur.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < uc.size(); ++j) {
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          annotated(i, j, [&] { return base_distance(surface, ur[i], uc[j], config); });
    }
  });
  return dist;
}

void write_path_csv(std::ostream& out, const Surface& surface, const PathPolyline& path) {
  out << "index";
  for (int k = 0; k < surface.base_dim(); ++k) out << ",b" << k + 1;
  for (int k = 0; k < surface.ambient_dim(); ++k) out << ",s" << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const Vector& b = path.waypoints[i];
    const Vector s = surface.map(b);
    out << i;
    for (Eigen::Index k = 0; k < b.size(); ++k) out << ',' << csv::format(b[k]);
    for (Eigen::Index k = 0; k < s.size(); ++k) out << ',' << csv::format(s[k]);
    out << '\n';
  }
}

}  // namespace gsml
