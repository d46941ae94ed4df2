#pragma once

#include <filesystem>
#include <iosfwd>

#include "gsml/surfaces.hpp"

namespace gsml {

/// Learnable linear map L acting on the base space.
struct LinearTransform {
  Matrix matrix;

  static LinearTransform identity(int d) { return {Matrix::Identity(d, d)}; }

  int dim() const { return static_cast<int>(matrix.rows()); }
  Vector apply(const Vector& b) const { return matrix * b; }

  /// ||L^T L||_fro, the quantity bounding the transform class.
  double quadratic_form_norm() const { return (matrix.transpose() * matrix).norm(); }

  /// Throws InputError on non-square, non-finite or mismatched matrices.
  void validate(int base_dim) const;
};

void write_transform_csv(std::ostream& out, const LinearTransform& t);
LinearTransform read_transform_csv(const std::filesystem::path& path);

}  // namespace gsml
