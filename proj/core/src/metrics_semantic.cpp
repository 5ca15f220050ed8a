#include "reasonscore/metrics_semantic.hpp"

#include <algorithm>
#include <cmath>

#include "reasonscore/alignment.hpp"
#include "reasonscore/error.hpp"
#include "reasonscore/stats.hpp"

namespace reasonscore {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

AlignmentVector steps_to_steps(const EmbeddingBundle& from, const EmbeddingBundle& to) {
  return align_vector(from.step_vectors, to.step_vectors);
}

void require_tokens(const EmbeddingBundle& bundle, const char* which) {
  if (!bundle.has_tokens())
    fail(errc::missing_tokens, std::string("token vectors missing for ") + which);
}

}  // namespace

double faithfulness_step(const EmbeddingBundle& h, const EmbeddingBundle& s) {
  return clamp01(stable_mean(steps_to_steps(h, s).values));
}

double faithfulness_token(const EmbeddingBundle& h, const EmbeddingBundle& s) {
  require_tokens(h, "hypothesis");
  require_tokens(s, "source");
  const AlignmentVector step_align = steps_to_steps(h, s);
  const std::vector<UnitVector> source_tokens = s.flat_tokens();
  std::vector<double> terms = step_align.values;
  for (const auto& step_tokens : h.token_vectors) {
    for (const UnitVector& tok : step_tokens)
      terms.push_back(align_one(tok, source_tokens));
  }
  return clamp01(stable_mean(terms));
}

double informativeness_step(const EmbeddingBundle& h, const EmbeddingBundle& s) {
  const double hs = stable_mean(steps_to_steps(h, s).values);
  const double sh = stable_mean(steps_to_steps(s, h).values);
  return clamp01((hs + sh) / 2.0);
}

std::optional<double> repetition_token(const EmbeddingBundle& h) {
  if (h.step_count() < 2) return std::nullopt;
  require_tokens(h, "hypothesis");
  double worst = 0.0;
  for (std::size_t i = 1; i < h.step_count(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      worst = std::max(worst, token_step_alignment_mean(h.token_vectors[i],
                                                        h.token_vectors[j]));
    }
  }
  return clamp01(1.0 - worst);
}

double hallucination(const EmbeddingBundle& h, const EmbeddingBundle& s,
                     const EmbeddingBundle& r) {
  const AlignmentVector hs = steps_to_steps(h, s);
  const AlignmentVector hr = steps_to_steps(h, r);
  double worst = 0.0;
  for (std::size_t i = 0; i < hs.values.size(); ++i)
    worst = std::max(worst, (1.0 - hs.values[i]) * (1.0 - hr.values[i]));
  return clamp01(1.0 - worst);
}

double redundancy(const EmbeddingBundle& h, const EmbeddingBundle& r) {
  const AlignmentVector hr = steps_to_steps(h, r);
  return clamp01(*std::min_element(hr.values.begin(), hr.values.end()));
}

double semantic_coverage_step(const EmbeddingBundle& h, const EmbeddingBundle& r,
                              const EmbeddingBundle& s) {
  const double rs = stable_mean(steps_to_steps(r, s).values);
  const double hs = stable_mean(steps_to_steps(h, s).values);
  return clamp01(std::abs(rs - hs));
}

double reasoning_alignment(const EmbeddingBundle& h, const EmbeddingBundle& r) {
  return clamp01(stable_mean(steps_to_steps(h, r).values));
}

double commonsense(const EmbeddingBundle& r, const EmbeddingBundle& h,
                   const EmbeddingBundle& s) {
  const AlignmentVector rh = steps_to_steps(r, h);
  const AlignmentVector rs = steps_to_steps(r, s);
  double worst = 0.0;
  for (std::size_t i = 0; i < rh.values.size(); ++i)
    worst = std::max(worst, (1.0 - rh.values[i]) * (1.0 - rs.values[i]));
  return clamp01(1.0 - worst);
}

double missing_step(const EmbeddingBundle& r, const EmbeddingBundle& h) {
  const AlignmentVector rh = steps_to_steps(r, h);
  return clamp01(*std::min_element(rh.values.begin(), rh.values.end()));
}

double informativeness_chain(const EmbeddingBundle& h, const EmbeddingBundle& s) {
  return clamp01((1.0 + cosine(h.chain_vector, s.chain_vector)) / 2.0);
}

std::optional<double> repetition_step(const EmbeddingBundle& h) {
  if (h.step_count() < 2) return std::nullopt;
  double worst = -1.0;
  for (std::size_t i = 1; i < h.step_count(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      worst = std::max(worst, cosine(h.step_vectors[i], h.step_vectors[j]));
  }
  return clamp01((1.0 - worst) / 2.0);
}

double semantic_coverage_chain(const EmbeddingBundle& r, const EmbeddingBundle& h) {
  return clamp01((1.0 + cosine(r.chain_vector, h.chain_vector)) / 2.0);
}

}  // namespace reasonscore
