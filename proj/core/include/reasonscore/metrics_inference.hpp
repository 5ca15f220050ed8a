#pragma once

#include <optional>
#include <vector>

#include "reasonscore/chain.hpp"
#include "reasonscore/providers.hpp"

namespace reasonscore {

/// Which text of a pair plays the NLI premise. The default treats the
/// earlier text (previous step, or context sentence) as the premise; the
/// choice is configurable and recorded in run metadata because either
/// convention is defensible.
enum class NliOrientation { kEarlierPremise, kLaterPremise };

std::string_view to_string(NliOrientation o);
std::optional<NliOrientation> nli_orientation_from_string(std::string_view name);

/// Strict lower-triangular matrix of contradiction probabilities between
/// later step i and earlier step j (j < i).
class PairwiseContradictionMatrix {
 public:
  explicit PairwiseContradictionMatrix(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double p_contr);

 private:
  std::size_t n_;
  std::vector<double> probs_;
};

/// Batches all N(N-1)/2 step pairs through the provider.
PairwiseContradictionMatrix pairwise_contradictions(
    const std::vector<Step>& hypothesis, NliProvider& nli,
    NliOrientation orientation = NliOrientation::kEarlierPremise);

/// 1 - max contradiction probability over step pairs; nullopt for 1-step
/// chains.
std::optional<double> self_consistency(const PairwiseContradictionMatrix& probs);
std::optional<double> self_consistency(
    const std::vector<Step>& hypothesis, NliProvider& nli,
    NliOrientation orientation = NliOrientation::kEarlierPremise);

/// 1 - max contradiction probability over all step/sentence pairs.
double source_consistency(const std::vector<Step>& hypothesis,
                          const std::vector<Sentence>& source, NliProvider& nli,
                          NliOrientation orientation = NliOrientation::kEarlierPremise);

/// Inverse chain perplexity, in (0,1].
double perplexity_chain(const std::vector<Step>& hypothesis, PerplexityProvider& ppl);

/// Inverse of the mean per-step perplexity, in (0,1].
double perplexity_step(const std::vector<Step>& hypothesis, PerplexityProvider& ppl);

/// Mean grammatical-acceptability probability over the steps.
double grammar_score(const std::vector<Step>& hypothesis, GrammarProvider& grammar);

}  // namespace reasonscore
