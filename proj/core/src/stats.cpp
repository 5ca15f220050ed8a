#include "reasonscore/stats.hpp"

#include <algorithm>
#include <cmath>

#include "reasonscore/error.hpp"

namespace reasonscore {

double stable_sum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  return sum;
}

double stable_mean(std::span<const double> values) {
  if (values.empty()) fail(errc::empty_group, "mean of an empty range");
  return stable_sum(values) / static_cast<double>(values.size());
}

double quantile_linear(std::span<const double> sorted_values, double q) {
  if (sorted_values.empty()) fail(errc::empty_group, "quantile of an empty range");
  if (q <= 0.0) return sorted_values.front();
  if (q >= 1.0) return sorted_values.back();
  const double pos = q * static_cast<double>(sorted_values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted_values.size()) return sorted_values.back();
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

FiveNumberSummary summarize(std::vector<double> values) {
  if (values.empty()) fail(errc::empty_group, "summary of an empty group");
  std::sort(values.begin(), values.end());
  FiveNumberSummary s;
  s.count = values.size();
  s.min = values.front();
  s.q1 = quantile_linear(values, 0.25);
  s.median = quantile_linear(values, 0.5);
  s.q3 = quantile_linear(values, 0.75);
  s.max = values.back();
  return s;
}

}  // namespace reasonscore
