#include "gsml/surfaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "gsml/errors.hpp"

namespace gsml {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

Vector to_vector(std::span<const double> x) {
  Vector v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) v[static_cast<Eigen::Index>(k)] = x[k];
  return v;
}

void require_dim(const Vector& v, int d, const char* what) {
  if (v.size() != d) {
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                     std::to_string(v.size()));
  }
}

Matrix lorentz_metric(int ambient) {
  Matrix g = Matrix::Identity(ambient, ambient);
  g(ambient - 1, ambient - 1) = -1.0;
  return g;
}

class EuclideanSurface final : public Surface {
 public:
  explicit EuclideanSurface(int d) : Surface(d, d, Matrix::Identity(d, d)) {}

  std::string name() const override { return "euclidean:" + std::to_string(base_dim()); }
  SurfaceKind kind() const override { return SurfaceKind::kEuclidean; }

  Vector map(const Vector& b) const override {
    require_dim(b, base_dim(), "euclidean map");
    return b;
  }
  Vector inverse_map(const Vector& s) const override {
    require_dim(s, ambient_dim(), "euclidean inverse_map");
    return s;
  }
  Matrix jacobian(const Vector& b) const override {
    require_dim(b, base_dim(), "euclidean jacobian");
    return Matrix::Identity(base_dim(), base_dim());
  }

  bool has_closed_form() const override { return true; }
  double closed_form_distance(const Vector& s1, const Vector& s2) const override {
    return (s1 - s2).norm();
  }
  double closed_form_base_distance(const Vector& u, const Vector& v, Vector* grad_u,
                                   Vector* grad_v) const override {
    const Vector diff = u - v;
    const double r = diff.norm();
    if (grad_u || grad_v) {
      const Vector g = r > 0.0 ? Vector(diff / r) : Vector::Zero(u.size());
      if (grad_u) *grad_u = g;
      if (grad_v) *grad_v = -g;
    }
    return r;
  }

  double speed_squared(std::span<const double>, std::span<const double> velocity) const override {
    return dot(velocity, velocity);
  }
};

class HyperboloidSurface final : public Surface {
 public:
  explicit HyperboloidSurface(int d) : Surface(d, d + 1, lorentz_metric(d + 1)) {}

  std::string name() const override { return "hyperboloid:" + std::to_string(base_dim()); }
  SurfaceKind kind() const override { return SurfaceKind::kHyperboloid; }

  Vector map(const Vector& b) const override {
    require_dim(b, base_dim(), "hyperboloid map");
    Vector s(ambient_dim());
    s.head(base_dim()) = b;
    s[base_dim()] = std::sqrt(1.0 + b.squaredNorm());
    return s;
  }
  Vector inverse_map(const Vector& s) const override {
    require_dim(s, ambient_dim(), "hyperboloid inverse_map");
    return s.head(base_dim());
  }
  Matrix jacobian(const Vector& b) const override {
    require_dim(b, base_dim(), "hyperboloid jacobian");
    Matrix j = Matrix::Zero(ambient_dim(), base_dim());
    j.topRows(base_dim()).setIdentity();
    j.row(base_dim()) = (b / std::sqrt(1.0 + b.squaredNorm())).transpose();
    return j;
  }

  bool has_closed_form() const override { return true; }
  double closed_form_distance(const Vector& s1, const Vector& s2) const override {
    const double inner = s1.dot(ambient_metric() * s2);
    return std::acosh(std::max(-inner, 1.0));
  }
  double closed_form_base_distance(const Vector& u, const Vector& v, Vector* grad_u,
                                   Vector* grad_v) const override {
    const double su = std::sqrt(1.0 + u.squaredNorm());
    const double sv = std::sqrt(1.0 + v.squaredNorm());
    const double z = std::max(su * sv - u.dot(v), 1.0);
    if (grad_u || grad_v) {
      const double denom = std::sqrt((z - 1.0) * (z + 1.0));
      const bool flat = !(denom > 0.0);
      if (grad_u) *grad_u = flat ? Vector(Vector::Zero(u.size())) : Vector((u * (sv / su) - v) / denom);
      if (grad_v) *grad_v = flat ? Vector(Vector::Zero(v.size())) : Vector((v * (su / sv) - u) / denom);
    }
    return std::acosh(z);
  }

  double speed_squared(std::span<const double> point,
                       std::span<const double> velocity) const override {
    const double kk = dot(point, point);
    const double kv = dot(point, velocity);
    return dot(velocity, velocity) - kv * kv / (1.0 + kk);
  }
};

class HelicoidSurface final : public Surface {
 public:
  HelicoidSurface() : Surface(2, 3, Matrix::Identity(3, 3)) {}

  std::string name() const override { return "helicoid"; }
  SurfaceKind kind() const override { return SurfaceKind::kHelicoid; }

  Vector map(const Vector& b) const override {
    require_dim(b, 2, "helicoid map");
    return Vector{{b[0] * std::cos(b[1]), b[0] * std::sin(b[1]), b[1]}};
  }
  // w recovers x2 exactly; projecting (u, v) on (cos w, sin w) recovers x1.
  Vector inverse_map(const Vector& s) const override {
    require_dim(s, 3, "helicoid inverse_map");
    return Vector{{s[0] * std::cos(s[2]) + s[1] * std::sin(s[2]), s[2]}};
  }
  Matrix jacobian(const Vector& b) const override {
    require_dim(b, 2, "helicoid jacobian");
    const double c = std::cos(b[1]);
    const double s = std::sin(b[1]);
    Matrix j(3, 2);
    j << c, -b[0] * s,
         s, b[0] * c,
         0.0, 1.0;
    return j;
  }

  // dF/dx1 and dF/dx2 are orthogonal with squared norms 1 and 1 + x1^2.
  double speed_squared(std::span<const double> point,
                       std::span<const double> velocity) const override {
    return velocity[0] * velocity[0] + (1.0 + point[0] * point[0]) * velocity[1] * velocity[1];
  }
};

class MongePatch final : public Surface {
 public:
  MongePatch(std::string name, int d, HeightFunction h, HeightGradient grad, DomainPredicate domain)
      : Surface(d, d + 1, Matrix::Identity(d + 1, d + 1)),
        name_(std::move(name)),
        h_(std::move(h)),
        grad_(std::move(grad)),
        domain_(std::move(domain)) {}

  std::string name() const override { return "monge:" + name_ + ":" + std::to_string(base_dim()); }
  SurfaceKind kind() const override { return SurfaceKind::kMongePatch; }

  Vector map(const Vector& b) const override {
    require_dim(b, base_dim(), "monge map");
    Vector s(ambient_dim());
    s.head(base_dim()) = b;
    s[base_dim()] = h_(b);
    return s;
  }
  Vector inverse_map(const Vector& s) const override {
    require_dim(s, ambient_dim(), "monge inverse_map");
    return s.head(base_dim());
  }
  Matrix jacobian(const Vector& b) const override {
    require_dim(b, base_dim(), "monge jacobian");
    Matrix j = Matrix::Zero(ambient_dim(), base_dim());
    j.topRows(base_dim()).setIdentity();
    j.row(base_dim()) = height_gradient(b).transpose();
    return j;
  }
  bool in_domain(const Vector& b) const override {
    return Surface::in_domain(b) && (!domain_ || domain_(b));
  }

  double speed_squared(std::span<const double> point,
                       std::span<const double> velocity) const override {
    const Vector g = height_gradient(to_vector(point));
    double gv = 0.0;
    for (std::size_t k = 0; k < velocity.size(); ++k) gv += g[static_cast<Eigen::Index>(k)] * velocity[k];
    return dot(velocity, velocity) + gv * gv;
  }

 private:
  Vector height_gradient(const Vector& b) const {
    if (grad_) return grad_(b);
    Vector g(b.size());
    Vector probe = b;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      const double step = 1e-6 * (1.0 + std::abs(b[k]));
      probe[k] = b[k] + step;
      const double up = h_(probe);
      probe[k] = b[k] - step;
      const double down = h_(probe);
      probe[k] = b[k];
      g[k] = (up - down) / (2.0 * step);
    }
    return g;
  }

  std::string name_;
  HeightFunction h_;
  HeightGradient grad_;
  DomainPredicate domain_;
};

struct NamedPatch {
  HeightFunction h;
  HeightGradient grad;
};

const std::map<std::string, NamedPatch>& patch_registry() {
  static const std::map<std::string, NamedPatch> registry = {
      {"flat", {[](const Vector&) { return 0.0; }, [](const Vector& x) -> Vector { return Vector::Zero(x.size()); }}},
      {"paraboloid", {[](const Vector& x) { return x.squaredNorm(); }, [](const Vector& x) -> Vector { return 2.0 * x; }}},
      {"sinusoid",
       {[](const Vector& x) { return x.array().sin().sum(); },
        [](const Vector& x) -> Vector { return x.array().cos().matrix(); }}},
  };
  return registry;
}

int parse_dim(std::string_view text, std::string_view spec) {
  int d = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ec != std::errc() || ptr != text.data() + text.size() || d < 1) {
    throw InputError("surface '" + std::string(spec) + "': dimension must be a positive integer");
  }
  return d;
}

}  // namespace

Surface::Surface(int base_dim, int ambient_dim, Matrix metric)
    : base_dim_(base_dim), ambient_dim_(ambient_dim), metric_(std::move(metric)) {
  if (base_dim < 1) throw InputError("surface base dimension must be >= 1");
  if (ambient_dim < base_dim) throw InputError("surface ambient dimension must be >= base dimension");
}

Matrix Surface::jacobian(const Vector& b) const { return finite_difference_jacobian(b); }

Matrix Surface::finite_difference_jacobian(const Vector& b) const {
  Matrix j(ambient_dim(), base_dim());
  Vector probe = b;
  for (int k = 0; k < base_dim(); ++k) {
    const double step = 1e-6 * (1.0 + std::abs(b[k]));
    probe[k] = b[k] + step;
    const Vector up = map(probe);
    probe[k] = b[k] - step;
    const Vector down = map(probe);
    probe[k] = b[k];
    j.col(k) = (up - down) / (2.0 * step);
  }
  return j;
}

bool Surface::in_domain(const Vector& b) const {
  return b.size() == base_dim() && b.allFinite();
}

double Surface::closed_form_distance(const Vector&, const Vector&) const {
  throw InputError("surface " + name() + " has no closed-form distance");
}

double Surface::closed_form_base_distance(const Vector& u, const Vector& v, Vector* grad_u,
                                          Vector* grad_v) const {
  if (grad_u || grad_v) {
    throw InputError("surface " + name() + " has no closed-form distance gradient");
  }
  return closed_form_distance(map(u), map(v));
}

double Surface::speed_squared(std::span<const double> point,
                              std::span<const double> velocity) const {
  const Vector tangent = jacobian(to_vector(point)) * to_vector(velocity);
  return tangent.dot(ambient_metric() * tangent);
}

void BasePointSet::validate(const Surface& surface) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != surface.base_dim()) {
      throw InputError("point " + std::to_string(i) + " has dimension " +
                       std::to_string(points[i].size()) + ", surface " + surface.name() +
                       " expects " + std::to_string(surface.base_dim()));
    }
    if (!surface.in_domain(points[i])) {
      throw InputError("point " + std::to_string(i) + " lies outside the base space of " +
                       surface.name());
    }
  }
  if (labels && labels->size() != points.size()) {
    throw InputError("label count " + std::to_string(labels->size()) + " does not match point count " +
                     std::to_string(points.size()));
  }
}

SurfacePtr euclidean_surface(int d) {
  if (d < 1) throw InputError("euclidean surface needs d >= 1");
  return std::make_shared<EuclideanSurface>(d);
}

SurfacePtr hyperboloid_surface(int d) {
  if (d < 1) throw InputError("hyperboloid surface needs d >= 1");
  return std::make_shared<HyperboloidSurface>(d);
}

SurfacePtr helicoid_surface() { return std::make_shared<HelicoidSurface>(); }

SurfacePtr monge_patch_surface(std::string name, int d, HeightFunction h, HeightGradient grad_h,
                               DomainPredicate domain) {
  if (d < 1) throw InputError("monge patch needs d >= 1");
  if (!h) throw InputError("monge patch needs a height function");
  return std::make_shared<MongePatch>(std::move(name), d, std::move(h), std::move(grad_h),
                                      std::move(domain));
}

std::vector<std::string> monge_patch_names() {
  std::vector<std::string> names;
  for (const auto& [name, patch] : patch_registry()) names.push_back(name);
  return names;
}

SurfacePtr make_surface(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "euclidean") return euclidean_surface(parse_dim(rest, spec));
  if (head == "hyperboloid") return hyperboloid_surface(parse_dim(rest, spec));
  if (head == "helicoid" && colon == std::string_view::npos) return helicoid_surface();
  if (head == "monge") {
    const auto second = rest.find(':');
    const std::string name(rest.substr(0, second));
    const int d = second == std::string_view::npos ? 2 : parse_dim(rest.substr(second + 1), spec);
    const auto& registry = patch_registry();
    const auto it = registry.find(name);
    if (it == registry.end()) throw InputError("unknown monge patch '" + name + "'");
    return monge_patch_surface(name, d, it->second.h, it->second.grad);
  }
  throw InputError("unknown surface '" + std::string(spec) +
                   "' (expected euclidean:<d>, hyperboloid:<d>, helicoid, monge:<name>)");
}

double hyperboloid_integrand(const Vector& kappa, const Vector& kappa_dot) {
  const double kk = kappa.squaredNorm();
  const double kv = kappa.dot(kappa_dot);
  const double arg = kappa_dot.squaredNorm() - kv * kv / (1.0 + kk);
  return std::sqrt(std::max(arg, 0.0));
}

double generic_integrand(const Surface& surface, const Vector& kappa, const Vector& kappa_dot) {
  const Matrix d = surface.jacobian(kappa);
  const double arg = kappa_dot.dot(d.transpose() * surface.ambient_metric() * d * kappa_dot);
  return std::sqrt(std::max(arg, 0.0));
}

double hyperboloid_transformed_distance(const Matrix& L, const Vector& b1, const Vector& b2) {
  const Matrix gram = L.transpose() * L;
  const double d11 = b1.dot(gram * b1);
  const double d22 = b2.dot(gram * b2);
  const double d12 = b1.dot(gram * b2);
  return std::acosh(std::max(std::sqrt((1.0 + d11) * (1.0 + d22)) - d12, 1.0));
}

}  // namespace gsml
