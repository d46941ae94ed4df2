#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gsml {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class SurfaceKind { kEuclidean, kHyperboloid, kHelicoid, kMongePatch };

/// A single-chart manifold S = F(B) with B an open subset of R^d and
/// F: B -> R^D. Lengths are measured with the ambient bilinear form
/// <u, v> = u^T G v, which need not be Euclidean (the hyperboloid uses the
/// Lorentzian signature).
///
/// Surfaces are immutable once built; every member is safe to call
/// concurrently.
class Surface {
 public:
  virtual ~Surface() = default;

  virtual std::string name() const = 0;
  virtual SurfaceKind kind() const = 0;

  int base_dim() const { return base_dim_; }
  int ambient_dim() const { return ambient_dim_; }
  const Matrix& ambient_metric() const { return metric_; }

  virtual Vector map(const Vector& b) const = 0;
  virtual Vector inverse_map(const Vector& s) const = 0;

  /// D x d matrix dF/db. The base implementation uses central differences
  /// with step 1e-6 * (1 + |b_k|).
  virtual Matrix jacobian(const Vector& b) const;
  Matrix finite_difference_jacobian(const Vector& b) const;

  /// Whether b lies in the base space B. Built-in surfaces accept every
  /// finite point.
  virtual bool in_domain(const Vector& b) const;

  virtual bool has_closed_form() const { return false; }

  /// Closed-form distance between two surface points. Throws when the
  /// surface has none.
  virtual double closed_form_distance(const Vector& s1, const Vector& s2) const;

  /// Closed-form distance between F(u) and F(v), written in base
  /// coordinates. When grad_u / grad_v are non-null they receive the
  /// gradient with respect to u and v (zero at coincident points).
  virtual double closed_form_base_distance(const Vector& u, const Vector& v,
                                           Vector* grad_u = nullptr,
                                           Vector* grad_v = nullptr) const;

  /// Squared speed of F o kappa at a point: kdot^T J^T G J kdot. May come out
  /// marginally negative from roundoff; callers clamp.
  virtual double speed_squared(std::span<const double> point,
                               std::span<const double> velocity) const;

 protected:
  Surface(int base_dim, int ambient_dim, Matrix metric);

 private:
  int base_dim_;
  int ambient_dim_;
  Matrix metric_;
};

using SurfacePtr = std::shared_ptr<const Surface>;

/// Points in the base space with optional class labels.
struct BasePointSet {
  std::vector<Vector> points;
  std::optional<std::vector<int>> labels;

  std::size_t size() const { return points.size(); }

  /// Throws InputError if a point has the wrong dimension or leaves the
  /// domain, or if the label count does not match.
  void validate(const Surface& surface) const;
};

SurfacePtr euclidean_surface(int d);
SurfacePtr hyperboloid_surface(int d);
SurfacePtr helicoid_surface();

using HeightFunction = std::function<double(const Vector&)>;
using HeightGradient = std::function<Vector(const Vector&)>;
using DomainPredicate = std::function<bool(const Vector&)>;

/// Monge patch x -> (x, h(x)) with the ambient Euclidean metric. Without an
/// analytic gradient, central differences of h are used.
SurfacePtr monge_patch_surface(std::string name, int d, HeightFunction h,
                               HeightGradient grad_h = {}, DomainPredicate domain = {});

/// Names accepted after "monge:" by make_surface.
std::vector<std::string> monge_patch_names();

/// Resolves "euclidean:<d>", "hyperboloid:<d>", "helicoid",
/// "monge:<name>" or "monge:<name>:<d>" (d defaults to 2).
SurfacePtr make_surface(std::string_view spec);

/// Arc-length integrand on the hyperboloid written purely in base
/// coordinates: sqrt(kdot.kdot - (kappa.kdot)^2 / (1 + kappa.kappa)).
double hyperboloid_integrand(const Vector& kappa, const Vector& kappa_dot);

/// sqrt(kdot^T D^T G D kdot) assembled from the surface's Jacobian and
/// ambient metric matrices; argument clamped at zero.
double generic_integrand(const Surface& surface, const Vector& kappa, const Vector& kappa_dot);

/// Distance between F(L b1) and F(L b2) on the hyperboloid via the Gram
/// entries Delta_ij = b_i^T L^T L b_j.
double hyperboloid_transformed_distance(const Matrix& L, const Vector& b1, const Vector& b2);

}  // namespace gsml
