#pragma once

#include <span>
#include <vector>

#include "reasonscore/vec.hpp"

namespace reasonscore {

/// Per-unit alignment values from one text to another; each value lies in
/// [0,1].
struct AlignmentVector {
  std::vector<double> values;
  std::size_t from_len = 0;
  std::size_t to_len = 0;
};

/// alpha = (1 + max_j cos(source, target_j)) / 2.
double align_one(const UnitVector& source, std::span<const UnitVector> targets);

/// align_one applied per source vector, order preserved.
AlignmentVector align_vector(std::span<const UnitVector> sources,
                             std::span<const UnitVector> targets);

/// Mean over `step_tokens` of their alignment to `target_tokens`.
double token_step_alignment_mean(std::span<const UnitVector> step_tokens,
                                 std::span<const UnitVector> target_tokens);

}  // namespace reasonscore
