#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace reasonscore {

inline constexpr double kUnitNormTolerance = 1e-6;

/// An L2-normalized, finite vector. Instances can only be produced through
/// the validating factories, so downstream code may rely on unit norm.
class UnitVector {
 public:
  /// Normalizes `values`. Rejects zero and non-finite vectors instead of
  /// epsilon-patching them (cosine against a zero vector is undefined).
  static UnitVector normalized(std::vector<double> values);

  /// Accepts `values` only if already unit-norm within kUnitNormTolerance.
  static UnitVector checked(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  bool operator==(const UnitVector& other) const = default;

 private:
  explicit UnitVector(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

/// Cosine similarity of two unit vectors, clamped to [-1, 1]. Vectors with
/// identical components compare to exactly 1.0, so identical texts under a
/// deterministic embedder yield exact scores downstream.
double cosine(const UnitVector& a, const UnitVector& b);

}  // namespace reasonscore
