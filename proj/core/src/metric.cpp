#include "reasonscore/metric.hpp"

namespace reasonscore {

MetricFamily family(MetricId id) {
  switch (id) {
    case MetricId::kFaithfulnessStep:
    case MetricId::kFaithfulnessToken:
    case MetricId::kInformativenessStep:
    case MetricId::kRepetitionToken:
    case MetricId::kHallucination:
    case MetricId::kRedundancy:
    case MetricId::kSemanticCoverageStep:
    case MetricId::kReasoningAlignment:
    case MetricId::kCommonsense:
    case MetricId::kMissingStep:
      return MetricFamily::kSemanticAlignment;
    case MetricId::kInformativenessChain:
    case MetricId::kRepetitionStep:
    case MetricId::kSemanticCoverageChain:
      return MetricFamily::kSemanticSimilarity;
    case MetricId::kSelfConsistency:
    case MetricId::kSourceConsistency:
      return MetricFamily::kLogicalInference;
    case MetricId::kPerplexityChain:
    case MetricId::kPerplexityStep:
    case MetricId::kGrammar:
      return MetricFamily::kLanguageCoherence;
  }
  return MetricFamily::kSemanticAlignment;
}

bool requires_reference(MetricId id) {
  switch (id) {
    case MetricId::kHallucination:
    case MetricId::kRedundancy:
    case MetricId::kSemanticCoverageStep:
    case MetricId::kReasoningAlignment:
    case MetricId::kCommonsense:
    case MetricId::kMissingStep:
    case MetricId::kSemanticCoverageChain:
      return true;
    default:
      return false;
  }
}

Orientation orientation(MetricId id) {
  return id == MetricId::kSemanticCoverageStep ? Orientation::kLowerIsBetter
                                               : Orientation::kHigherIsBetter;
}

std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::kFaithfulnessStep: return "faithfulness_step";
    case MetricId::kFaithfulnessToken: return "faithfulness_token";
    case MetricId::kInformativenessStep: return "informativeness_step";
    case MetricId::kRepetitionToken: return "repetition_token";
    case MetricId::kHallucination: return "hallucination";
    case MetricId::kRedundancy: return "redundancy";
    case MetricId::kSemanticCoverageStep: return "semantic_coverage_step";
    case MetricId::kReasoningAlignment: return "reasoning_alignment";
    case MetricId::kCommonsense: return "commonsense";
    case MetricId::kMissingStep: return "missing_step";
    case MetricId::kInformativenessChain: return "informativeness_chain";
    case MetricId::kRepetitionStep: return "repetition_step";
    case MetricId::kSemanticCoverageChain: return "semantic_coverage_chain";
    case MetricId::kSelfConsistency: return "self_consistency";
    case MetricId::kSourceConsistency: return "source_consistency";
    case MetricId::kPerplexityChain: return "perplexity_chain";
    case MetricId::kPerplexityStep: return "perplexity_step";
    case MetricId::kGrammar: return "grammar";
  }
  return "";
}

std::string_view to_string(MetricFamily f) {
  switch (f) {
    case MetricFamily::kSemanticAlignment: return "SA";
    case MetricFamily::kSemanticSimilarity: return "SS";
    case MetricFamily::kLogicalInference: return "LI";
    case MetricFamily::kLanguageCoherence: return "LC";
  }
  return "";
}

std::string_view to_string(Orientation o) {
  return o == Orientation::kHigherIsBetter ? "higher_is_better" : "lower_is_better";
}

std::optional<MetricId> metric_from_string(std::string_view name) {
  for (MetricId id : kAllMetrics) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

}  // namespace reasonscore
