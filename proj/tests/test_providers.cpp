#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "reasonscore/error.hpp"
#include "reasonscore/providers.hpp"
#include "reasonscore/rng.hpp"

#include "support/testutil.hpp"

using namespace reasonscore;

TEST_CASE("hash embedder is deterministic and text-sensitive") {
  HashEmbeddingProvider provider(32, 9);
  const std::vector<std::string> cat = {"cat"};
  const auto a = provider.embed(cat, Granularity::kStep);
  const auto b = provider.embed(cat, Granularity::kStep);
  CHECK(a == b);

  const std::vector<std::string> dog = {"dog"};
  const auto c = provider.embed(dog, Granularity::kStep);
  CHECK(cosine(a[0], c[0]) < 1.0);
}

TEST_CASE("hash embedder follows the documented construction") {
  // Re-derive one token vector from scratch: SplitMix64 seeded with
  // fnv1a64(token) xor run seed, dim components 2*u-1, L2-normalized.
  const std::uint64_t run_seed = 77;
  const std::size_t dim = 8;
  HashEmbeddingProvider provider(dim, run_seed);
  const std::string token = "pieces";

  SplitMix64 stream(fnv1a64(token) ^ run_seed);
  std::vector<double> expected(dim);
  double norm = 0.0;
  for (double& c : expected) {
    c = 2.0 * stream.next_double() - 1.0;
    norm += c * c;
  }
  for (double& c : expected) c /= std::sqrt(norm);

  const UnitVector actual = provider.token_vector(token);
  for (std::size_t i = 0; i < dim; ++i)
    CHECK(actual[i] == doctest::Approx(expected[i]).epsilon(1e-15));
}

TEST_CASE("step vector is the normalized mean of token vectors") {
  HashEmbeddingProvider provider(16, 1);
  const std::vector<std::string> texts = {"cats chase mice"};
  const auto step = provider.embed(texts, Granularity::kStep).at(0);
  const auto tokens = provider.embed_tokens(texts).at(0);
  std::vector<double> mean(16, 0.0);
  for (const UnitVector& t : tokens) {
    for (std::size_t i = 0; i < 16; ++i) mean[i] += t[i];
  }
  const UnitVector expected = UnitVector::normalized(mean);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(step[i] == doctest::Approx(expected[i]).epsilon(1e-12));

  // chain vector over the space-joined text equals the all-token mean
  const std::string joined = "cats chase mice";
  const auto chain =
      provider.embed(std::vector<std::string>{joined}, Granularity::kChain).at(0);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(chain[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("identical texts produce identical bundles") {
  HashEmbeddingProvider provider(24, 5);
  const auto steps = make_steps({"All dogs bark.", "Some cats meow."});
  const EmbeddingBundle a = make_bundle(steps, provider, true);
  const EmbeddingBundle b = make_bundle(steps, provider, true);
  CHECK(a.step_vectors == b.step_vectors);
  CHECK(a.token_vectors == b.token_vectors);
  CHECK(a.chain_vector == b.chain_vector);
  CHECK(a.token_vectors.at(0).size() == steps.at(0).tokens().size());
  CHECK(a.token_vectors.at(1).size() == steps.at(1).tokens().size());
}

TEST_CASE("bundle validation rejects broken shapes and non-unit vectors") {
  HashEmbeddingProvider provider(8, 0);
  const auto steps = make_steps({"a b", "c"});
  EmbeddingBundle bundle = make_bundle(steps, provider, true);
  CHECK_NOTHROW(validate_bundle(bundle, steps));

  EmbeddingBundle wrong_count = bundle;
  wrong_count.step_vectors.pop_back();
  CHECK_THROWS_AS(validate_bundle(wrong_count, steps), Error);

  EmbeddingBundle wrong_tokens = bundle;
  wrong_tokens.token_vectors[0].pop_back();
  CHECK_THROWS_AS(validate_bundle(wrong_tokens, steps), Error);
}

TEST_CASE("zero vectors are rejected, never patched") {
  CHECK_THROWS_AS(UnitVector::normalized({0.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(UnitVector::normalized({1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(UnitVector::checked({0.5, 0.5}), Error);
}

TEST_CASE("heuristic NLI detects negation pairs") {
  HeuristicNliProvider nli;
  CHECK(nli.contradiction("Bob is cold", "Bob is not cold") == 1.0);
  CHECK(nli.contradiction("Bob is not cold", "Bob is cold") == 1.0);
  CHECK(nli.contradiction("A", "A") == 0.0);
  CHECK(nli.contradiction("Bob is cold", "Bob is warm") == 0.0);
  CHECK(nli.contradiction("He never sleeps", "He sleeps") == 1.0);
  CHECK(nli.contradiction("no rain today", "rain today") == 1.0);
  // judgments are a valid distribution
  const NliPair pair{"Bob is cold", "Bob is not cold"};
  const auto j = nli.judge(std::span<const NliPair>(&pair, 1)).at(0);
  CHECK(j.p_entail + j.p_neutral + j.p_contradict == doctest::Approx(1.0));
}

TEST_CASE("fixture NLI returns mapped values and a 0.0 default") {
  testutil::TempDir dir("nli");
  const auto path = dir.path() / "nli.json";
  testutil::write_file(path, R"({"p1": {"h1": 0.8, "h2": [0.1, 0.2, 0.7]}})");
  FixtureNliProvider nli(path.string());
  CHECK(nli.contradiction("p1", "h1") == doctest::Approx(0.8));
  CHECK(nli.contradiction("p1", "h2") == doctest::Approx(0.7));
  CHECK(nli.contradiction("unknown", "pair") == 0.0);
  // orientation matters: the fixture is keyed premise-first
  CHECK(nli.contradiction("h1", "p1") == 0.0);
}

TEST_CASE("hash perplexity is deterministic and within [1, 100]") {
  HashPerplexityProvider ppl(3);
  const auto steps = make_steps({"the cat sat", "on the mat"});
  const auto chain1 = ppl.perplexity(steps, PerplexityMode::kChainContext);
  const auto chain2 = ppl.perplexity(steps, PerplexityMode::kChainContext);
  CHECK(chain1 == chain2);
  CHECK(chain1.size() == 1);
  CHECK(chain1[0] >= 1.0);
  CHECK(chain1[0] <= 100.0);
  const auto per_step = ppl.perplexity(steps, PerplexityMode::kStepLocal);
  CHECK(per_step.size() == 2);
  for (double p : per_step) {
    CHECK(p >= 1.0);
    CHECK(p <= 100.0);
  }
}

TEST_CASE("fixture perplexity passes values through") {
  testutil::TempDir dir("ppl");
  const auto path = dir.path() / "ppl.json";
  testutil::write_file(path, R"({"one step": 1.0, "slow step": 4.0, "default": 2.0})");
  FixturePerplexityProvider ppl(path.string());
  const auto steps = make_steps({"one step", "slow step", "unknown step"});
  const auto values = ppl.perplexity(steps, PerplexityMode::kStepLocal);
  CHECK(values == std::vector<double>{1.0, 4.0, 2.0});
}

TEST_CASE("fixture perplexity without default rejects unknown text") {
  testutil::TempDir dir("pplmiss");
  const auto path = dir.path() / "ppl.json";
  testutil::write_file(path, R"({"one step": 1.0})");
  FixturePerplexityProvider ppl(path.string());
  const auto steps = make_steps({"mystery"});
  CHECK_THROWS_AS(ppl.perplexity(steps, PerplexityMode::kStepLocal), Error);
}

TEST_CASE("fixture grammar uses mapped values with 0.5 default") {
  testutil::TempDir dir("gram");
  const auto path = dir.path() / "grammar.json";
  testutil::write_file(path, R"({"good step": 1.0, "bad step": 0.0})");
  FixtureGrammarProvider grammar(path.string());
  const std::vector<std::string> texts = {"good step", "bad step", "unseen"};
  CHECK(grammar.acceptability(texts) == std::vector<double>{1.0, 0.0, 0.5});
}

TEST_CASE("hash grammar probabilities are deterministic and in [0,1]") {
  HashGrammarProvider grammar(8);
  const std::vector<std::string> texts = {"the sky is blue", "dog runs"};
  const auto a = grammar.acceptability(texts);
  const auto b = grammar.acceptability(texts);
  CHECK(a == b);
  for (double p : a) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("provider config validation") {
  ProviderConfig config;
  config.max_batch = 0;
  CHECK_THROWS_AS(validate(config), Error);
  config.max_batch = 4;
  config.retries = -1;
  CHECK_THROWS_AS(validate(config), Error);
  config.retries = 0;
  CHECK_NOTHROW(validate(config));
}

TEST_CASE("provider factories cover remote, hash and fixture kinds") {
  ProviderConfig config;
  CHECK(make_embedding_provider("hash", config) != nullptr);
  CHECK(make_nli_provider("hash", config) != nullptr);
  CHECK(make_nli_provider("heuristic", config) != nullptr);
  CHECK(make_perplexity_provider("hash", config) != nullptr);
  CHECK(make_grammar_provider("hash", config) != nullptr);
  CHECK_THROWS_AS(make_embedding_provider("banana", config), Error);
}
