#include "reasonscore/metrics_inference.hpp"

#include <algorithm>
#include <cmath>

#include "reasonscore/error.hpp"
#include "reasonscore/stats.hpp"

namespace reasonscore {
namespace {

double validated_ppl(double ppl) {
  if (!(ppl >= 1.0)) fail(errc::invalid_perplexity, "perplexity below 1");
  return ppl;
}

NliPair oriented_pair(const std::string& earlier, const std::string& later,
                      NliOrientation orientation) {
  if (orientation == NliOrientation::kEarlierPremise) return {earlier, later};
  return {later, earlier};
}

}  // namespace

std::string_view to_string(NliOrientation o) {
  return o == NliOrientation::kEarlierPremise ? "earlier_premise" : "later_premise";
}

std::optional<NliOrientation> nli_orientation_from_string(std::string_view name) {
  if (name == "earlier_premise") return NliOrientation::kEarlierPremise;
  if (name == "later_premise") return NliOrientation::kLaterPremise;
  return std::nullopt;
}

PairwiseContradictionMatrix::PairwiseContradictionMatrix(std::size_t n)
    : n_(n), probs_(n * (n > 0 ? n - 1 : 0) / 2, 0.0) {}

namespace {
std::size_t tri_index(std::size_t i, std::size_t j) {
  // row i holds i entries (j = 0..i-1)
  return i * (i - 1) / 2 + j;
}
}  // namespace

double PairwiseContradictionMatrix::at(std::size_t i, std::size_t j) const {
  if (j >= i || i >= n_) fail(errc::schema, "only j < i entries are populated");
  return probs_[tri_index(i, j)];
}

void PairwiseContradictionMatrix::set(std::size_t i, std::size_t j, double p_contr) {
  if (j >= i || i >= n_) fail(errc::schema, "only j < i entries are populated");
  if (p_contr < 0.0 || p_contr > 1.0)
    fail(errc::schema, "contradiction probability outside [0,1]");
  probs_[tri_index(i, j)] = p_contr;
}

PairwiseContradictionMatrix pairwise_contradictions(const std::vector<Step>& hypothesis,
                                                    NliProvider& nli,
                                                    NliOrientation orientation) {
  const std::size_t n = hypothesis.size();
  PairwiseContradictionMatrix matrix(n);
  if (n < 2) return matrix;
  std::vector<NliPair> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      pairs.push_back(oriented_pair(hypothesis[j].text(), hypothesis[i].text(), orientation));
  }
  const auto judgments = nli.judge(pairs);
  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) matrix.set(i, j, judgments[k++].p_contradict);
  }
  return matrix;
}

std::optional<double> self_consistency(const PairwiseContradictionMatrix& probs) {
  if (probs.size() < 2) return std::nullopt;
  double worst = 0.0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, probs.at(i, j));
  }
  return 1.0 - worst;
}

std::optional<double> self_consistency(const std::vector<Step>& hypothesis,
                                       NliProvider& nli, NliOrientation orientation) {
  return self_consistency(pairwise_contradictions(hypothesis, nli, orientation));
}

double source_consistency(const std::vector<Step>& hypothesis,
                          const std::vector<Sentence>& source, NliProvider& nli,
                          NliOrientation orientation) {
  if (hypothesis.empty() || source.empty())
    fail(errc::empty_chain, "source consistency requires steps and sentences");
  std::vector<NliPair> pairs;
  pairs.reserve(hypothesis.size() * source.size());
  for (const Step& step : hypothesis) {
    for (const Sentence& sent : source)
      pairs.push_back(oriented_pair(sent.text(), step.text(), orientation));
  }
  double worst = 0.0;
  for (const NliJudgment& j : nli.judge(pairs)) worst = std::max(worst, j.p_contradict);
  return 1.0 - worst;
}

double perplexity_chain(const std::vector<Step>& hypothesis, PerplexityProvider& ppl) {
  const auto values = ppl.perplexity(hypothesis, PerplexityMode::kChainContext);
  if (values.size() != 1)
    fail(errc::invalid_perplexity, "chain-context perplexity must be a single value");
  return 1.0 / validated_ppl(values[0]);
}

double perplexity_step(const std::vector<Step>& hypothesis, PerplexityProvider& ppl) {
  const auto values = ppl.perplexity(hypothesis, PerplexityMode::kStepLocal);
  if (values.size() != hypothesis.size())
    fail(errc::invalid_perplexity, "step-local perplexity must be per step");
  for (double v : values) validated_ppl(v);
  return 1.0 / stable_mean(values);
}

double grammar_score(const std::vector<Step>& hypothesis, GrammarProvider& grammar) {
  const auto texts = step_texts(hypothesis);
  const auto probs = grammar.acceptability(texts);
  if (probs.size() != hypothesis.size())
    fail(errc::schema, "grammar provider must return one probability per step");
  for (double p : probs) {
    if (p < 0.0 || p > 1.0) fail(errc::schema, "grammar probability outside [0,1]");
  }
  return stable_mean(probs);
}

}  // namespace reasonscore
