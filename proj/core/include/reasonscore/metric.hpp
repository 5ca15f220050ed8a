#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace reasonscore {

/// The 18 chain-level scores. Serialized names are stable strings and part
/// of the file-format contract.
enum class MetricId {
  kFaithfulnessStep,
  kFaithfulnessToken,
  kInformativenessStep,
  kRepetitionToken,
  kHallucination,
  kRedundancy,
  kSemanticCoverageStep,
  kReasoningAlignment,
  kCommonsense,
  kMissingStep,
  kInformativenessChain,
  kRepetitionStep,
  kSemanticCoverageChain,
  kSelfConsistency,
  kSourceConsistency,
  kPerplexityChain,
  kPerplexityStep,
  kGrammar,
};

enum class MetricFamily {
  kSemanticAlignment,   // SA
  kSemanticSimilarity,  // SS
  kLogicalInference,    // LI
  kLanguageCoherence,   // LC
};

enum class Orientation { kHigherIsBetter, kLowerIsBetter };

inline constexpr std::array<MetricId, 18> kAllMetrics = {
    MetricId::kFaithfulnessStep,     MetricId::kFaithfulnessToken,
    MetricId::kInformativenessStep,  MetricId::kRepetitionToken,
    MetricId::kHallucination,        MetricId::kRedundancy,
    MetricId::kSemanticCoverageStep, MetricId::kReasoningAlignment,
    MetricId::kCommonsense,          MetricId::kMissingStep,
    MetricId::kInformativenessChain, MetricId::kRepetitionStep,
    MetricId::kSemanticCoverageChain, MetricId::kSelfConsistency,
    MetricId::kSourceConsistency,    MetricId::kPerplexityChain,
    MetricId::kPerplexityStep,       MetricId::kGrammar,
};

MetricFamily family(MetricId id);

/// True for the seven scores that compare against a gold reference chain.
bool requires_reference(MetricId id);

/// All scores are oriented 1 = best except semantic_coverage_step, which is
/// an absolute difference and therefore 0 = best. Recorded as metadata
/// rather than flipping the formula.
Orientation orientation(MetricId id);

std::string_view to_string(MetricId id);
std::string_view to_string(MetricFamily family);
std::string_view to_string(Orientation o);
std::optional<MetricId> metric_from_string(std::string_view name);

}  // namespace reasonscore
