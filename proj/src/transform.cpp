#include "gsml/transform.hpp"

#include <ostream>

#include "gsml/csv.hpp"
#include "gsml/errors.hpp"

namespace gsml {

void LinearTransform::validate(int base_dim) const {
  if (matrix.rows() != matrix.cols()) throw InputError("transform matrix must be square");
  if (matrix.rows() != base_dim) {
    throw InputError("transform is " + std::to_string(matrix.rows()) + "x" +
                     std::to_string(matrix.cols()) + " but the base space has dimension " +
                     std::to_string(base_dim));
  }
  if (!matrix.allFinite()) throw InputError("transform has non-finite entries");
}

void write_transform_csv(std::ostream& out, const LinearTransform& t) {
  csv::write_matrix(out, t.matrix);
}

LinearTransform read_transform_csv(const std::filesystem::path& path) {
  LinearTransform t{csv::read_matrix(path)};
  if (t.matrix.rows() != t.matrix.cols()) {
    throw InputError(path.string() + ": transform matrix must be square");
  }
  return t;
}

}  // namespace gsml
