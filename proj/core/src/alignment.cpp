#include "reasonscore/alignment.hpp"

#include <algorithm>

#include "reasonscore/error.hpp"
#include "reasonscore/stats.hpp"

namespace reasonscore {

double align_one(const UnitVector& source, std::span<const UnitVector> targets) {
  if (targets.empty()) fail(errc::empty_targets, "alignment requires at least one target");
  double best = -1.0;
  for (const UnitVector& t : targets) best = std::max(best, cosine(source, t));
  return (1.0 + best) / 2.0;
}

AlignmentVector align_vector(std::span<const UnitVector> sources,
                             std::span<const UnitVector> targets) {
  if (sources.empty()) fail(errc::empty_targets, "alignment requires at least one source");
  AlignmentVector out;
  out.from_len = sources.size();
  out.to_len = targets.size();
  out.values.reserve(sources.size());
  for (const UnitVector& s : sources) out.values.push_back(align_one(s, targets));
  return out;
}

double token_step_alignment_mean(std::span<const UnitVector> step_tokens,
                                 std::span<const UnitVector> target_tokens) {
  if (step_tokens.empty()) fail(errc::empty_targets, "step has no tokens");
  std::vector<double> alphas;
  alphas.reserve(step_tokens.size());
  for (const UnitVector& tok : step_tokens)
    alphas.push_back(align_one(tok, target_tokens));
  return stable_mean(alphas);
}

}  // namespace reasonscore
