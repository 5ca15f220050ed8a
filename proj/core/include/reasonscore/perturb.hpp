#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reasonscore/chain.hpp"

namespace reasonscore {

/// The twelve synthetic corruption rules. The first eight are generic; the
/// last four target arithmetic chains.
enum class PerturbationRule {
  kRepeatStep,
  kRemoveStep,
  kShuffleSteps,
  kSwapStep,
  kNegateStep,
  kHallucination,
  kGrammarError,
  kSemanticChange,
  kShuffleNumbers,
  kShuffleOperations,
  kRandomNumber,
  kRandomOperation,
};

inline constexpr std::array<PerturbationRule, 12> kAllRules = {
    PerturbationRule::kRepeatStep,      PerturbationRule::kRemoveStep,
    PerturbationRule::kShuffleSteps,    PerturbationRule::kSwapStep,
    PerturbationRule::kNegateStep,      PerturbationRule::kHallucination,
    PerturbationRule::kGrammarError,    PerturbationRule::kSemanticChange,
    PerturbationRule::kShuffleNumbers,  PerturbationRule::kShuffleOperations,
    PerturbationRule::kRandomNumber,    PerturbationRule::kRandomOperation,
};

std::string_view to_string(PerturbationRule rule);
std::optional<PerturbationRule> rule_from_string(std::string_view name);

/// The error type a rule simulates; one type per rule.
ErrorType error_type(PerturbationRule rule);

struct PerturbOptions {
  /// Restrict SwapStep to adjacent positions.
  bool adjacent_swap_only = false;
};

/// Material drawn from the rest of the corpus: whole steps for
/// Hallucination, entity-like words for SemanticChange.
struct StepPool {
  std::vector<std::string> steps;
  std::vector<std::string> entities;
};

StepPool build_pool(std::span<const ReasoningChain> corpus, std::string_view exclude_chain_id);

/// Record of one applied rule. Replaying the rule with the recorded seed on
/// the same base steps (and pool) reproduces the output byte-exactly;
/// params_json documents the concrete choices for auditing.
struct AppliedPerturbation {
  PerturbationRule rule;
  std::uint64_t seed = 0;
  std::string params_json;
};

struct ApplyOutcome {
  std::vector<std::string> steps;
  AppliedPerturbation applied;
};

/// Applies one rule; all randomness comes from `seed`. The output always
/// differs from the input in at least one step. Throws rule_inapplicable
/// when the rule's preconditions are unmet; callers must pick a different
/// rule rather than no-op.
ApplyOutcome apply_rule(const std::vector<std::string>& steps, PerturbationRule rule,
                        std::uint64_t seed, const StepPool* pool = nullptr,
                        const PerturbOptions& options = {});

/// A chain whose hypothesis was synthesized from its reference, possibly
/// corrupted. `applied` is non-empty exactly when the chain is labeled
/// perturbed.
struct PerturbedChain {
  ReasoningChain base;
  std::vector<std::string> hypothesis;
  std::vector<AppliedPerturbation> applied;

  bool perturbed() const noexcept { return !applied.empty(); }

  /// Chain with the synthesized hypothesis, labels derived from the applied
  /// rules, and the replay record embedded in the extra fields.
  ReasoningChain to_chain() const;
};

/// Copies each dataset chain's reference into its hypothesis, then corrupts
/// exactly round(fraction * n) uniformly chosen chains with one uniformly
/// chosen applicable rule each. Chains where no rule applies stay clean and
/// another candidate is corrupted instead; if the target count cannot be
/// met, throws perturbation_infeasible. Deterministic under `seed`.
std::vector<PerturbedChain> build_diagnostics(std::span<const ReasoningChain> dataset,
                                              std::span<const PerturbationRule> rules,
                                              double fraction, std::uint64_t seed,
                                              const PerturbOptions& options = {});

/// Variants of one chain with 1..max_level rules applied cumulatively.
/// Rules are drawn without replacement until the pool is exhausted, then the
/// pool refills (a pool smaller than max_level implies reuse). Later rules
/// never delete artifacts introduced by earlier ones, so each level strictly
/// adds corruption.
std::vector<std::pair<int, PerturbedChain>> inject_levels(
    const ReasoningChain& chain, int max_level, std::uint64_t seed,
    const StepPool& pool, std::span<const PerturbationRule> rules = kAllRules,
    const PerturbOptions& options = {});

/// Re-applies a recorded rule sequence to the reference steps. Byte-exact
/// with respect to the original run given the same pool and options.
std::vector<std::string> replay(const std::vector<std::string>& reference_steps,
                                std::span<const AppliedPerturbation> applied,
                                const StepPool* pool = nullptr,
                                const PerturbOptions& options = {});

/// Parses the replay record embedded by PerturbedChain::to_chain.
std::vector<AppliedPerturbation> applied_from_chain(const ReasoningChain& chain);

}  // namespace reasonscore
