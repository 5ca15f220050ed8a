#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reasonscore/chain.hpp"
#include "reasonscore/perturb.hpp"

namespace reasonscore {

struct CorrelationResult {
  double d = 0.0;        // Somers' D(Y|X), in [-1,1]
  double p_value = 1.0;  // two-sided
  std::size_t n = 0;
  std::size_t n_pos = 0;  // count of the larger label value (binary X only)
  std::size_t n_neg = 0;  // count of the smaller label value (binary X only)
};

enum class PValueMethod {
  kPermutation,  // seeded label shuffle; distribution-free, the default
  kAsymptotic,   // normal approximation, for parity checks
};

struct SomersOptions {
  PValueMethod method = PValueMethod::kPermutation;
  int permutations = 10000;  // 0 skips the test and reports p = 1
  std::uint64_t seed = 0;
};

/// Somers' D(Y|X) by pair counting: over all pairs with x_a != x_b,
/// (concordant - discordant) / all such pairs; pairs tied on y stay in the
/// denominator. Permutation p-value: p = (1 + #{|D_perm| >= |D_obs|}) /
/// (1 + permutations). Throws length_mismatch and degenerate_x.
CorrelationResult somers_d(std::span<const double> x, std::span<const double> y,
                           const SomersOptions& options = {});

/// Max D over entries significant at `alpha`; empty when none qualifies
/// (rendered as "-" in reports).
std::optional<double> aggregate_max(const std::map<std::string, CorrelationResult>& results,
                                    double alpha = 0.05);

using ChainScoreFn = std::function<std::optional<double>(const ReasoningChain&)>;

/// For each level 1..max_level: corrupts every chain to that level, scores
/// corrupted and clean variants, and correlates the clean/corrupted
/// indicator (1 = clean) against the scores. Deterministic under `seed`.
std::vector<std::pair<int, CorrelationResult>> sensitivity_curve(
    std::span<const ReasoningChain> dataset, std::span<const PerturbationRule> rules,
    int max_level, const ChainScoreFn& score, std::uint64_t seed,
    const SomersOptions& options = {});

}  // namespace reasonscore
