#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reasonscore/chain.hpp"
#include "reasonscore/vec.hpp"

namespace reasonscore {

/// Step-, token-, and chain-level unit vectors for one text.
/// token_vectors may be empty when token granularity was not requested;
/// when present, token_vectors[i] has exactly one vector per canonical
/// token of step i.
struct EmbeddingBundle {
  std::vector<UnitVector> step_vectors;
  std::vector<std::vector<UnitVector>> token_vectors;
  UnitVector chain_vector;
  std::size_t dim = 0;

  std::size_t step_count() const noexcept { return step_vectors.size(); }
  bool has_tokens() const noexcept { return !token_vectors.empty(); }
  std::vector<UnitVector> flat_tokens() const;
};

/// Checks the bundle invariants against the steps it claims to embed.
void validate_bundle(const EmbeddingBundle& bundle, const std::vector<Step>& steps);

struct NliJudgment {
  double p_entail = 0.0;
  double p_neutral = 0.0;
  double p_contradict = 0.0;
};

/// Validated constructor: probabilities in [0,1] summing to 1 within 1e-6.
NliJudgment make_nli_judgment(double p_entail, double p_neutral, double p_contradict);

struct ProviderConfig {
  std::string endpoint;
  std::string auth_env = "REASONSCORE_API_KEY";
  std::size_t max_batch = 32;
  int timeout_ms = 10000;
  int retries = 2;
  std::size_t dim = 64;
  std::uint64_t seed = 0;
  std::string fixture_path;
};

void validate(const ProviderConfig& config);

enum class Granularity { kStep, kToken, kChain };

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// One unit vector per text, in input order. `granularity` must be kStep
  /// or kChain (token vectors have a different shape; see embed_tokens).
  virtual std::vector<UnitVector> embed(std::span<const std::string> texts,
                                        Granularity granularity) = 0;

  /// Per text, one unit vector per canonical token of that text.
  virtual std::vector<std::vector<UnitVector>> embed_tokens(
      std::span<const std::string> texts) = 0;

  virtual std::size_t dim() const = 0;
};

struct NliPair {
  std::string premise;
  std::string hypothesis;
};

class NliProvider {
 public:
  virtual ~NliProvider() = default;
  virtual std::vector<NliJudgment> judge(std::span<const NliPair> pairs) = 0;

  double contradiction(const std::string& premise, const std::string& hypothesis);
};

enum class PerplexityMode { kChainContext, kStepLocal };

class PerplexityProvider {
 public:
  virtual ~PerplexityProvider() = default;
  /// kChainContext: a single PPL for the space-joined chain (one element).
  /// kStepLocal: one PPL per step. Every value is >= 1.
  virtual std::vector<double> perplexity(const std::vector<Step>& steps,
                                         PerplexityMode mode) = 0;
};

class GrammarProvider {
 public:
  virtual ~GrammarProvider() = default;
  /// Probability of grammatical acceptability per text, each in [0,1].
  virtual std::vector<double> acceptability(std::span<const std::string> texts) = 0;
};

struct ProviderSet {
  std::shared_ptr<EmbeddingProvider> embedding;
  std::shared_ptr<NliProvider> nli;
  std::shared_ptr<PerplexityProvider> perplexity;
  std::shared_ptr<GrammarProvider> grammar;
};

// --- Offline providers ------------------------------------------------------

/// Deterministic, model-free embedder. Per token: a SplitMix64 stream seeded
/// with FNV-1a(token bytes) XOR the run seed yields dim components uniform in
/// [-1,1], then the vector is L2-normalized. Step vectors are normalized
/// means of their token vectors; the chain vector is the normalized mean
/// over the tokens of the space-joined text. Identical texts always produce
/// identical bundles.
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::size_t dim = 64, std::uint64_t seed = 0);

  std::vector<UnitVector> embed(std::span<const std::string> texts,
                                Granularity granularity) override;
  std::vector<std::vector<UnitVector>> embed_tokens(
      std::span<const std::string> texts) override;
  std::size_t dim() const override { return dim_; }

  UnitVector token_vector(const std::string& token) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Embeddings looked up from a JSON fixture keyed by exact input strings
/// (token lookups use the token text). Vectors are normalized on load.
class FixtureEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FixtureEmbeddingProvider(const std::string& fixture_path);

  std::vector<UnitVector> embed(std::span<const std::string> texts,
                                Granularity granularity) override;
  std::vector<std::vector<UnitVector>> embed_tokens(
      std::span<const std::string> texts) override;
  std::size_t dim() const override { return dim_; }

 private:
  UnitVector lookup(const std::string& text) const;
  std::map<std::string, UnitVector> table_;
  std::size_t dim_ = 0;
};

/// Negation-rule contradiction detector: p_contr = 1 iff the two texts are
/// equal after dropping the negation tokens {not, n't, never, no}
/// (case-insensitive) but unequal verbatim; otherwise 0.
class HeuristicNliProvider final : public NliProvider {
 public:
  std::vector<NliJudgment> judge(std::span<const NliPair> pairs) override;
};

/// NLI probabilities from a JSON fixture keyed by premise then hypothesis.
/// Unknown pairs default to p_contr = 0.
class FixtureNliProvider final : public NliProvider {
 public:
  explicit FixtureNliProvider(const std::string& fixture_path);
  std::vector<NliJudgment> judge(std::span<const NliPair> pairs) override;

 private:
  std::map<std::string, std::map<std::string, NliJudgment>> table_;
};

/// Deterministic perplexities: per-token surprisal uniform in [0, ln 100]
/// derived from the token hash (mixed with the run seed); the PPL of a unit
/// is exp(mean surprisal), so it always lies in [1, 100].
class HashPerplexityProvider final : public PerplexityProvider {
 public:
  explicit HashPerplexityProvider(std::uint64_t seed = 0) : seed_(seed) {}
  std::vector<double> perplexity(const std::vector<Step>& steps,
                                 PerplexityMode mode) override;

 private:
  double unit_ppl(std::span<const Token> tokens) const;
  std::uint64_t seed_;
};

/// PPL lookup from a JSON fixture keyed by the exact unit text (the step
/// text in step mode, the joined chain text in chain mode). A "default"
/// entry in the fixture covers unknown texts; without one, misses throw.
class FixturePerplexityProvider final : public PerplexityProvider {
 public:
  explicit FixturePerplexityProvider(const std::string& fixture_path);
  std::vector<double> perplexity(const std::vector<Step>& steps,
                                 PerplexityMode mode) override;

 private:
  double lookup(const std::string& text) const;
  std::map<std::string, double> table_;
  std::optional<double> default_;
};

/// Deterministic acceptability: uniform [0,1] from the hash of the step text.
class HashGrammarProvider final : public GrammarProvider {
 public:
  explicit HashGrammarProvider(std::uint64_t seed = 0) : seed_(seed) {}
  std::vector<double> acceptability(std::span<const std::string> texts) override;

 private:
  std::uint64_t seed_;
};

/// Acceptability from a JSON fixture keyed by exact step text; unknown
/// texts fall back to the fixture's "default" (0.5 when not declared).
class FixtureGrammarProvider final : public GrammarProvider {
 public:
  explicit FixtureGrammarProvider(const std::string& fixture_path);
  std::vector<double> acceptability(std::span<const std::string> texts) override;

 private:
  std::map<std::string, double> table_;
  double default_ = 0.5;
};

// --- Remote providers (HTTP + JSON, see README for the wire format) --------

class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(ProviderConfig config);
  std::vector<UnitVector> embed(std::span<const std::string> texts,
                                Granularity granularity) override;
  std::vector<std::vector<UnitVector>> embed_tokens(
      std::span<const std::string> texts) override;
  std::size_t dim() const override { return config_.dim; }

 private:
  ProviderConfig config_;
};

class RemoteNliProvider final : public NliProvider {
 public:
  explicit RemoteNliProvider(ProviderConfig config);
  std::vector<NliJudgment> judge(std::span<const NliPair> pairs) override;

 private:
  ProviderConfig config_;
};

class RemotePerplexityProvider final : public PerplexityProvider {
 public:
  explicit RemotePerplexityProvider(ProviderConfig config);
  std::vector<double> perplexity(const std::vector<Step>& steps,
                                 PerplexityMode mode) override;

 private:
  ProviderConfig config_;
};

class RemoteGrammarProvider final : public GrammarProvider {
 public:
  explicit RemoteGrammarProvider(ProviderConfig config);
  std::vector<double> acceptability(std::span<const std::string> texts) override;

 private:
  ProviderConfig config_;
};

// --- Factories --------------------------------------------------------------

/// kind: "remote" | "hash" | "fixture".
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const std::string& kind,
                                                           const ProviderConfig& config);
/// kind: "remote" | "hash" (the negation heuristic; "heuristic" is accepted
/// as an alias) | "fixture".
std::unique_ptr<NliProvider> make_nli_provider(const std::string& kind,
                                               const ProviderConfig& config);
std::unique_ptr<PerplexityProvider> make_perplexity_provider(const std::string& kind,
                                                             const ProviderConfig& config);
std::unique_ptr<GrammarProvider> make_grammar_provider(const std::string& kind,
                                                       const ProviderConfig& config);

/// Embeds all granularities for `steps` through one provider and validates
/// the result. Token vectors are included only when `with_tokens` is set.
EmbeddingBundle make_bundle(const std::vector<Step>& steps,
                            EmbeddingProvider& provider, bool with_tokens);

}  // namespace reasonscore
