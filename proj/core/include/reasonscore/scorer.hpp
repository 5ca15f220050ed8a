#pragma once

#include <vector>

#include "reasonscore/chain.hpp"
#include "reasonscore/metric.hpp"
#include "reasonscore/metrics_inference.hpp"
#include "reasonscore/providers.hpp"

namespace reasonscore {

struct ScorerOptions {
  /// Metrics to compute; empty means all 18.
  std::vector<MetricId> metrics;
  NliOrientation nli_orientation = NliOrientation::kEarlierPremise;
};

/// Computes the selected metrics for one chain. Reference-based metrics on
/// chains without a reference, and pairwise metrics on 1-step chains, are
/// recorded as not-applicable. Pure given the providers; chains can be
/// scored concurrently.
class ChainScorer {
 public:
  ChainScorer(ProviderSet providers, ScorerOptions options = {});

  ScoreReport score(const ReasoningChain& chain) const;

  const std::vector<MetricId>& metrics() const noexcept { return metrics_; }

 private:
  ProviderSet providers_;
  ScorerOptions options_;
  std::vector<MetricId> metrics_;
};

}  // namespace reasonscore
