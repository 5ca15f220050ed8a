#include "reasonscore/scorer.hpp"

#include <algorithm>

#include "reasonscore/error.hpp"
#include "reasonscore/metrics_semantic.hpp"

namespace reasonscore {

ChainScorer::ChainScorer(ProviderSet providers, ScorerOptions options)
    : providers_(std::move(providers)), options_(std::move(options)) {
  if (!providers_.embedding || !providers_.nli || !providers_.perplexity ||
      !providers_.grammar)
    fail(errc::config, "scorer needs all four providers");
  metrics_ = options_.metrics.empty()
                 ? std::vector<MetricId>(kAllMetrics.begin(), kAllMetrics.end())
                 : options_.metrics;
}

ScoreReport ChainScorer::score(const ReasoningChain& chain) const {
  ScoreReport report(chain.id());
  const auto selected = [&](MetricId id) {
    return std::find(metrics_.begin(), metrics_.end(), id) != metrics_.end();
  };

  const bool need_tokens =
      selected(MetricId::kFaithfulnessToken) || selected(MetricId::kRepetitionToken);
  bool need_embeddings = false;
  for (MetricId id : metrics_) {
    const MetricFamily f = family(id);
    need_embeddings = need_embeddings || f == MetricFamily::kSemanticAlignment ||
                      f == MetricFamily::kSemanticSimilarity;
  }

  std::optional<EmbeddingBundle> h, s, r;
  if (need_embeddings) {
    h = make_bundle(chain.hypothesis(), *providers_.embedding, need_tokens);
    s = make_bundle(chain.source(), *providers_.embedding, need_tokens);
    if (chain.has_reference())
      r = make_bundle(*chain.reference(), *providers_.embedding, false);
  }

  const auto set_or_na = [&](MetricId id, const std::optional<double>& value) {
    if (value)
      report.set(id, *value);
    else
      report.set_not_applicable(id);
  };

  for (MetricId id : metrics_) {
    if (requires_reference(id) && !chain.has_reference()) {
      report.set_not_applicable(id);
      continue;
    }
    switch (id) {
      case MetricId::kFaithfulnessStep:
        report.set(id, faithfulness_step(*h, *s));
        break;
      case MetricId::kFaithfulnessToken:
        report.set(id, faithfulness_token(*h, *s));
        break;
      case MetricId::kInformativenessStep:
        report.set(id, informativeness_step(*h, *s));
        break;
      case MetricId::kRepetitionToken:
        set_or_na(id, repetition_token(*h));
        break;
      case MetricId::kHallucination:
        report.set(id, hallucination(*h, *s, *r));
        break;
      case MetricId::kRedundancy:
        report.set(id, redundancy(*h, *r));
        break;
      case MetricId::kSemanticCoverageStep:
        report.set(id, semantic_coverage_step(*h, *r, *s));
        break;
      case MetricId::kReasoningAlignment:
        report.set(id, reasoning_alignment(*h, *r));
        break;
      case MetricId::kCommonsense:
        report.set(id, commonsense(*r, *h, *s));
        break;
      case MetricId::kMissingStep:
        report.set(id, missing_step(*r, *h));
        break;
      case MetricId::kInformativenessChain:
        report.set(id, informativeness_chain(*h, *s));
        break;
      case MetricId::kRepetitionStep:
        set_or_na(id, repetition_step(*h));
        break;
      case MetricId::kSemanticCoverageChain:
        report.set(id, semantic_coverage_chain(*r, *h));
        break;
      case MetricId::kSelfConsistency:
        set_or_na(id, self_consistency(chain.hypothesis(), *providers_.nli,
                                       options_.nli_orientation));
        break;
      case MetricId::kSourceConsistency:
        report.set(id, source_consistency(chain.hypothesis(), chain.source(),
                                          *providers_.nli, options_.nli_orientation));
        break;
      case MetricId::kPerplexityChain:
        report.set(id, perplexity_chain(chain.hypothesis(), *providers_.perplexity));
        break;
      case MetricId::kPerplexityStep:
        report.set(id, perplexity_step(chain.hypothesis(), *providers_.perplexity));
        break;
      case MetricId::kGrammar:
        report.set(id, grammar_score(chain.hypothesis(), *providers_.grammar));
        break;
    }
  }
  return report;
}

}  // namespace reasonscore
