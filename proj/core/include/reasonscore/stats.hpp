#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace reasonscore {

/// Sum with the addends sorted ascending first. Makes every mean-based
/// metric invariant under permutation of its inputs at the bit level, not
/// just up to rounding.
double stable_sum(std::span<const double> values);

double stable_mean(std::span<const double> values);

/// Linear-interpolation quantile over an ascending-sorted range.
/// quantile_linear([1,2,3,4], 0.25) == 1.75.
double quantile_linear(std::span<const double> sorted_values, double q);

struct FiveNumberSummary {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// min/Q1/median/Q3/max of `values`. Throws empty_group on empty input.
FiveNumberSummary summarize(std::vector<double> values);

}  // namespace reasonscore
