#include "reasonscore/meta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "reasonscore/error.hpp"
#include "reasonscore/rng.hpp"

namespace reasonscore {
namespace {

double pair_count_d(std::span<const double> x, std::span<const double> y) {
  long long num = 0;
  long long pairs = 0;
  const std::size_t n = x.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (x[a] == x[b]) continue;
      ++pairs;
      if (y[a] == y[b]) continue;
      const bool concordant = (x[a] < x[b]) == (y[a] < y[b]);
      num += concordant ? 1 : -1;
    }
  }
  return static_cast<double>(num) / static_cast<double>(pairs);
}

/// Doubled midranks of y (integers, so later sums stay exact).
std::vector<long long> doubled_midranks(std::span<const double> y) {
  const std::size_t n = y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  std::vector<long long> ranks(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && y[order[j]] == y[order[i]]) ++j;
    // doubled average of 1-based ranks i+1..j
    const long long doubled = static_cast<long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = doubled;
    i = j;
  }
  return ranks;
}

/// For binary x: D from the doubled midrank sum of the high-label group
/// (doubled sum = 2*R1, so 2*U = 2*R1 - n_hi*(n_hi+1)). Integer arithmetic
/// keeps this bit-identical to pair counting.
double binary_d_from_ranks(long long doubled_rank_sum_hi, long long n_hi, long long n_lo) {
  const long long two_u = doubled_rank_sum_hi - n_hi * (n_hi + 1);
  const long long num = two_u - n_hi * n_lo;
  return static_cast<double>(num) / static_cast<double>(n_hi * n_lo);
}

double normal_sf_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double asymptotic_p(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  long long total = 0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    long long c = 0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == k) continue;
      const int sx = x[k] < x[l] ? -1 : x[k] > x[l] ? 1 : 0;
      const int sy = y[k] < y[l] ? -1 : y[k] > y[l] ? 1 : 0;
      c += sx * sy;
    }
    total += c;
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  const double t = static_cast<double>(total);
  const double s = sum_sq - t * t / static_cast<double>(n);
  if (s <= 0.0) return total == 0 ? 1.0 : 0.0;
  return normal_sf_two_sided(t / (2.0 * std::sqrt(s)));
}

double permutation_p(std::span<const double> x, std::span<const double> y, double d_obs,
                     int permutations, std::uint64_t seed) {
  const std::size_t n = x.size();
  const double abs_obs = std::abs(d_obs);
  int hits = 0;

  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() == 2) {
    // Binary fast path: shuffling y is equivalent to drawing which doubled
    // midranks land in the high-label group.
    const double hi = *distinct.rbegin();
    std::vector<std::size_t> hi_positions;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == hi) hi_positions.push_back(i);
    }
    const long long n_hi = static_cast<long long>(hi_positions.size());
    const long long n_lo = static_cast<long long>(n) - n_hi;
    const std::vector<long long> ranks = doubled_midranks(y);
    for (int r = 0; r < permutations; ++r) {
      // each replicate shuffles a fresh copy under its own derived seed, so
      // replicates are order-free and can run in parallel
      std::vector<long long> permuted = ranks;
      SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      shuffle(permuted, rng);
      long long sum_hi = 0;
      for (const std::size_t i : hi_positions) sum_hi += permuted[i];
      const double d_perm = binary_d_from_ranks(sum_hi, n_hi, n_lo);
      if (std::abs(d_perm) >= abs_obs) ++hits;
    }
  } else {
    for (int r = 0; r < permutations; ++r) {
      std::vector<double> shuffled(y.begin(), y.end());
      SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      shuffle(shuffled, rng);
      if (std::abs(pair_count_d(x, shuffled)) >= abs_obs) ++hits;
    }
  }
  return static_cast<double>(1 + hits) / static_cast<double>(1 + permutations);
}

}  // namespace

CorrelationResult somers_d(std::span<const double> x, std::span<const double> y,
                           const SomersOptions& options) {
  if (x.size() != y.size())
    fail(errc::length_mismatch, "somers_d requires equally long x and y");
  if (x.size() < 2) fail(errc::length_mismatch, "somers_d requires n >= 2");
  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < 2)
    fail(errc::degenerate_x, "somers_d requires at least two distinct x values");

  CorrelationResult result;
  result.n = x.size();
  result.d = pair_count_d(x, y);
  if (distinct.size() == 2) {
    const double hi = *distinct.rbegin();
    for (double v : x) {
      if (v == hi)
        ++result.n_pos;
      else
        ++result.n_neg;
    }
  }
  if (options.method == PValueMethod::kAsymptotic) {
    result.p_value = asymptotic_p(x, y);
  } else if (options.permutations > 0) {
    result.p_value = permutation_p(x, y, result.d, options.permutations, options.seed);
  } else {
    result.p_value = 1.0;  // no test performed
  }
  return result;
}

std::optional<double> aggregate_max(const std::map<std::string, CorrelationResult>& results,
                                    double alpha) {
  std::optional<double> best;
  for (const auto& [key, r] : results) {
    if (r.p_value >= alpha) continue;
    if (!best || r.d > *best) best = r.d;
  }
  return best;
}

std::vector<std::pair<int, CorrelationResult>> sensitivity_curve(
    std::span<const ReasoningChain> dataset, std::span<const PerturbationRule> rules,
    int max_level, const ChainScoreFn& score, std::uint64_t seed,
    const SomersOptions& options) {
  if (dataset.empty()) fail(errc::empty_chain, "sensitivity needs at least one chain");

  struct PerChain {
    std::optional<double> clean_score;
    std::vector<std::optional<double>> level_scores;
  };
  std::vector<PerChain> rows;
  rows.reserve(dataset.size());

  for (const ReasoningChain& chain : dataset) {
    const StepPool pool = build_pool(dataset, chain.id());
    const auto variants = inject_levels(chain, max_level, derive_seed(seed, chain.id()),
                                        pool, rules);
    PerChain row;
    const PerturbedChain clean{chain, step_texts(*chain.reference()), {}};
    row.clean_score = score(clean.to_chain());
    row.level_scores.resize(static_cast<std::size_t>(max_level));
    for (const auto& [level, variant] : variants)
      row.level_scores[static_cast<std::size_t>(level - 1)] = score(variant.to_chain());
    rows.push_back(std::move(row));
  }

  std::vector<std::pair<int, CorrelationResult>> curve;
  for (int level = 1; level <= max_level; ++level) {
    std::vector<double> x, y;
    for (const PerChain& row : rows) {
      const auto& corrupted = row.level_scores[static_cast<std::size_t>(level - 1)];
      if (row.clean_score) {
        x.push_back(1.0);  // label 1 = clean chain
        y.push_back(*row.clean_score);
      }
      if (corrupted) {
        x.push_back(0.0);
        y.push_back(*corrupted);
      }
    }
    SomersOptions level_options = options;
    level_options.seed = derive_seed(options.seed, static_cast<std::uint64_t>(level));
    curve.emplace_back(level, somers_d(x, y, level_options));
  }
  return curve;
}

}  // namespace reasonscore
