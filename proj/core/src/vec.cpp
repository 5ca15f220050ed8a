#include "reasonscore/vec.hpp"

#include <algorithm>
#include <cmath>

#include "reasonscore/error.hpp"

namespace reasonscore {

UnitVector UnitVector::normalized(std::vector<double> values) {
  if (values.empty()) fail(errc::dim_mismatch, "cannot normalize an empty vector");
  double sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) fail(errc::zero_vector, "non-finite vector component");
    sq += v * v;
  }
  if (sq == 0.0) fail(errc::zero_vector, "backend returned an all-zero vector");
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : values) v *= inv;
  return UnitVector(std::move(values));
}

UnitVector UnitVector::checked(std::vector<double> values) {
  if (values.empty()) fail(errc::dim_mismatch, "cannot check an empty vector");
  double sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) fail(errc::zero_vector, "non-finite vector component");
    sq += v * v;
  }
  if (std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance)
    fail(errc::zero_vector, "vector is not unit-norm");
  return UnitVector(std::move(values));
}

double cosine(const UnitVector& a, const UnitVector& b) {
  if (a.dim() != b.dim()) fail(errc::dim_mismatch, "cosine of vectors with different dims");
  double dot = 0.0;
  bool identical = true;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a[i] * b[i];
    identical = identical && a[i] == b[i];
  }
  if (identical) return 1.0;
  return std::clamp(dot, -1.0, 1.0);
}

}  // namespace reasonscore
