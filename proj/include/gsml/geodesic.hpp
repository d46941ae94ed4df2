#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gsml/surfaces.hpp"
#include "gsml/transform.hpp"

namespace gsml {

struct GeodesicConfig {
  int n_intermediate = 16;
  int n_samples = 32;
  int quadrature_points = 16;
  int max_sweeps = 500;
  double rel_tol = 1e-4;
  /// Converged once the last `patience` sweeps together shorten the path by
  /// less than rel_tol relative to its length before them.
  int patience = 10;
  std::uint64_t seed = 0;
  /// Record the total length after every accepted waypoint move.
  bool record_trace = false;

  void validate() const;
};

/// Piecewise-linear path in the base space. Segment i joins waypoints i and
/// i + 1; length is the sum of the segment lengths on the surface.
struct PathPolyline {
  std::vector<Vector> waypoints;
  std::vector<double> segment_lengths;
  double length = 0.0;

  /// Recomputes every segment length from scratch.
  double recompute_length(const Surface& surface, int quadrature_points) const;
};

struct RefineResult {
  PathPolyline path;
  int sweeps = 0;
  int accepted_moves = 0;
  /// Total length before the first sweep, then after each accepted move
  /// (only filled when GeodesicConfig::record_trace is set).
  std::vector<double> length_trace;
};

struct DistanceWithGradient {
  double value = 0.0;
  Vector grad_u;
  Vector grad_v;
};

/// Length on the surface of the straight base-space segment a -> b, by
/// Gauss-Legendre quadrature of sqrt(kdot^T J^T G J kdot). Exactly symmetric
/// in (a, b). Throws NumericalError("non-lengthlike segment") when the
/// squared speed is below -1e-6 somewhere along the segment.
double segment_length(const Surface& surface, const Vector& a, const Vector& b,
                      int quadrature_points);

/// Iterative polyline refinement between base points a and b. Each sweep
/// visits the intermediate waypoints in order, draws n_samples candidates
/// uniformly from the ball of radius 2 * max(adjacent segment lengths in B)
/// restricted to the domain, and moves the waypoint to the best candidate
/// when that strictly shortens its two adjacent segments.
RefineResult refine_base_path(const Surface& surface, const Vector& a, const Vector& b,
                              const GeodesicConfig& config, std::uint64_t stream_seed);

/// As refine_base_path, with surface points as endpoints and the stream seed
/// derived from the unordered endpoint pair.
RefineResult refine_path(const Surface& surface, const Vector& x, const Vector& y,
                         const GeodesicConfig& config);

/// Seed shared by (a, b) and (b, a).
std::uint64_t pair_seed(std::uint64_t seed, const Vector& a, const Vector& b);

/// Distance between surface points: closed form when available, otherwise
/// refinement with a pair-derived seed. distance(x, y) == distance(y, x)
/// bit-for-bit.
double distance(const Surface& surface, const Vector& x, const Vector& y,
                const GeodesicConfig& config);

/// distance() with both endpoints given in base coordinates.
double base_distance(const Surface& surface, const Vector& a, const Vector& b,
                     const GeodesicConfig& config);

/// Distance plus its gradient with respect to both base endpoints. Closed-form
/// surfaces differentiate analytically; otherwise the refined path is held
/// fixed and only the two end segments are differentiated (central
/// differences), which is the derivative of the optimal length when the
/// interior waypoints are optimal.
DistanceWithGradient base_distance_gradient(const Surface& surface, const Vector& a,
                                            const Vector& b, const GeodesicConfig& config);

/// Symmetric matrix of rho^F_L over a point set (L = identity when transform
/// is null). Pairs are evaluated in parallel; output does not depend on the
/// thread count.
Matrix pairwise_distances(const Surface& surface, const std::vector<Vector>& points,
                          const LinearTransform* transform, const GeodesicConfig& config);

/// rows x cols matrix of distances between two point sets.
Matrix cross_distances(const Surface& surface, const std::vector<Vector>& rows,
                       const std::vector<Vector>& cols, const LinearTransform* transform,
                       const GeodesicConfig& config);

/// One waypoint per row: index, base coordinates, then ambient coordinates.
void write_path_csv(std::ostream& out, const Surface& surface, const PathPolyline& path);

}  // namespace gsml
