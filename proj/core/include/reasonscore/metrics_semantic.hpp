#pragma once

#include <optional>

#include "reasonscore/providers.hpp"

namespace reasonscore {

// Embedding-based scores over precomputed bundles for the hypothesis h, the
// source s and (where required) the reference r. Every score lies in [0,1].
// Pairwise scores over a single step (repetition_*) return nullopt for
// 1-step chains instead of a default value.

/// Mean alignment of hypothesis steps to the source sentences.
double faithfulness_step(const EmbeddingBundle& h, const EmbeddingBundle& s);

/// Same grounding idea at token resolution: the mean over the N step
/// alignments and all M token alignments together. Requires token vectors
/// on both bundles.
double faithfulness_token(const EmbeddingBundle& h, const EmbeddingBundle& s);

/// Symmetric grounding: mean of source->hypothesis and hypothesis->source
/// mean alignments.
double informativeness_step(const EmbeddingBundle& h, const EmbeddingBundle& s);

/// 1 minus the highest mean token alignment between any later step and any
/// earlier step. Punishes chains with near-duplicate steps.
std::optional<double> repetition_token(const EmbeddingBundle& h);

/// Flags steps unaligned with both the source and the reference.
double hallucination(const EmbeddingBundle& h, const EmbeddingBundle& s,
                     const EmbeddingBundle& r);

/// Lowest alignment of any hypothesis step to the reference.
double redundancy(const EmbeddingBundle& h, const EmbeddingBundle& r);

/// Absolute difference between the reference's and the hypothesis's mean
/// grounding in the source. Lower is better.
double semantic_coverage_step(const EmbeddingBundle& h, const EmbeddingBundle& r,
                              const EmbeddingBundle& s);

/// Mean alignment of hypothesis steps to the reference.
double reasoning_alignment(const EmbeddingBundle& h, const EmbeddingBundle& r);

/// Flags reference steps grounded in neither the hypothesis nor the source.
double commonsense(const EmbeddingBundle& r, const EmbeddingBundle& h,
                   const EmbeddingBundle& s);

/// Lowest alignment of any reference step to the hypothesis.
double missing_step(const EmbeddingBundle& r, const EmbeddingBundle& h);

/// Whole-chain agreement: (1 + cos(chain_h, chain_s)) / 2.
double informativeness_chain(const EmbeddingBundle& h, const EmbeddingBundle& s);

/// (1 - max pairwise step cosine) / 2 over earlier/later step pairs.
std::optional<double> repetition_step(const EmbeddingBundle& h);

/// Whole-chain similarity to the reference: (1 + cos(chain_r, chain_h)) / 2.
double semantic_coverage_chain(const EmbeddingBundle& r, const EmbeddingBundle& h);

}  // namespace reasonscore
