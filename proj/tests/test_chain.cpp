#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "reasonscore/chain.hpp"
#include "reasonscore/error.hpp"
#include "reasonscore/rng.hpp"

#include "support/testutil.hpp"

using namespace reasonscore;

TEST_CASE("tokenize splits on whitespace and peels punctuation") {
  CHECK(tokenize("He chews 4 pieces.") ==
        std::vector<Token>{"He", "chews", "4", "pieces", "."});
  CHECK(tokenize("x") == std::vector<Token>{"x"});
  CHECK(tokenize("a  b") == std::vector<Token>{"a", "b"});
  CHECK(tokenize("(hello)!") == std::vector<Token>{"(", "hello", ")", "!"});
  CHECK(tokenize("don't stop") == std::vector<Token>{"don't", "stop"});
  CHECK(tokenize("...") == std::vector<Token>{".", ".", "."});
  CHECK(tokenize("<<3+4=7>>") == std::vector<Token>{"<", "<", "3+4=7", ">", ">"});
  CHECK(tokenize("a\tb\nc") == std::vector<Token>{"a", "b", "c"});
  CHECK(tokenize("caf\xC3\xA9.") == std::vector<Token>{"caf\xC3\xA9", "."});
}

TEST_CASE("tokenize rejects empty input") {
  CHECK_THROWS_AS(tokenize(""), Error);
  CHECK_THROWS_AS(tokenize("   \t "), Error);
}

TEST_CASE("tokenize is idempotent on its own tokens") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto steps = testutil::random_step_texts(1, 6, rng, "t");
    for (const Token& token : tokenize(steps[0])) {
      CAPTURE(token);
      CHECK(tokenize(token) == std::vector<Token>{token});
    }
  }
  for (const char* text : {"He chews 4 pieces.", "(a-b)! c?", "x ... y"}) {
    for (const Token& token : tokenize(text)) {
      CHECK(tokenize(token) == std::vector<Token>{token});
    }
  }
}

TEST_CASE("split_sentences handles terminators followed by whitespace") {
  CHECK(split_sentences("A is B. C is D.") ==
        std::vector<std::string>{"A is B.", "C is D."});
  CHECK(split_sentences("Hello") == std::vector<std::string>{"Hello"});
  CHECK(split_sentences("Go! Stop? Yes.") ==
        std::vector<std::string>{"Go!", "Stop?", "Yes."});
  CHECK(split_sentences("What?! Really") ==
        std::vector<std::string>{"What?!", "Really"});
  // abbreviations are not handled, by contract
  CHECK(split_sentences("Dr. Who arrived.") ==
        std::vector<std::string>{"Dr.", "Who arrived."});
  CHECK_THROWS_AS(split_sentences(""), Error);
}

TEST_CASE("join_chain uses exactly one space") {
  CHECK(join_chain(std::vector<std::string>{"a", "b"}) == "a b");
  CHECK(join_chain(std::vector<std::string>{"a"}) == "a");
  CHECK(join_chain(std::vector<std::string>{"x y", "z"}) == "x y z");
  CHECK_THROWS_AS(join_chain(std::vector<std::string>{}), Error);
}

TEST_CASE("join then split recovers steps without internal spaces") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> steps;
    const std::size_t n = 1 + rng.next_below(6);
    for (std::size_t i = 0; i < n; ++i)
      steps.push_back("w" + std::to_string(rng.next_below(1000)));
    const std::string joined = join_chain(steps);
    std::vector<std::string> recovered;
    std::size_t start = 0;
    while (start <= joined.size()) {
      std::size_t end = joined.find(' ', start);
      if (end == std::string::npos) end = joined.size();
      recovered.push_back(joined.substr(start, end - start));
      start = end + 1;
    }
    CHECK(recovered == steps);
  }
}

TEST_CASE("steps cache their tokens and reject blank text") {
  const Step step("All dogs bark.");
  CHECK(step.tokens() == tokenize(step.text()));
  CHECK_THROWS_AS(Step("  "), Error);
}

TEST_CASE("chain invariants") {
  const auto steps = make_steps({"a b", "c d"});
  CHECK_THROWS_AS(ReasoningChain("x", {}, steps), Error);
  CHECK_THROWS_AS(ReasoningChain("x", steps, {}), Error);
  CHECK_THROWS_AS(ReasoningChain("x", steps, steps, std::vector<Step>{}), Error);
  const ReasoningChain chain("x", steps, steps, steps);
  CHECK(chain.has_reference());
  CHECK(chain.hypothesis().size() == 2);
}

TEST_CASE("error type names are stable") {
  for (ErrorType type : kAllErrorTypes) {
    CHECK(error_type_from_string(to_string(type)) == type);
  }
  CHECK(to_string(ErrorType::kMissingStep) == "missing_step");
  CHECK(!error_type_from_string("nonsense"));
}

TEST_CASE("score report rejects out-of-range values and records orientation") {
  ScoreReport report("c1");
  CHECK_THROWS_AS(report.set(MetricId::kGrammar, 1.5), Error);
  CHECK_THROWS_AS(report.set(MetricId::kGrammar, -0.1), Error);
  report.set(MetricId::kGrammar, 0.25);
  report.set_not_applicable(MetricId::kRepetitionStep);
  CHECK(report.value(MetricId::kGrammar) == 0.25);
  CHECK(!report.value(MetricId::kRepetitionStep));
  CHECK(report.is_not_applicable(MetricId::kRepetitionStep));
  // every recorded metric has an orientation entry
  CHECK(report.orientations().count(MetricId::kGrammar) == 1);
  CHECK(report.orientations().count(MetricId::kRepetitionStep) == 1);
  CHECK(orientation(MetricId::kSemanticCoverageStep) == Orientation::kLowerIsBetter);
  CHECK(orientation(MetricId::kPerplexityChain) == Orientation::kHigherIsBetter);
}

TEST_CASE("metric metadata: families and reference requirements") {
  int reference_based = 0;
  for (MetricId id : kAllMetrics) {
    if (requires_reference(id)) ++reference_based;
    CHECK(metric_from_string(to_string(id)) == id);
  }
  CHECK(reference_based == 7);
  CHECK(requires_reference(MetricId::kHallucination));
  CHECK(requires_reference(MetricId::kSemanticCoverageChain));
  CHECK(!requires_reference(MetricId::kFaithfulnessStep));
  CHECK(family(MetricId::kRepetitionToken) == MetricFamily::kSemanticAlignment);
  CHECK(family(MetricId::kRepetitionStep) == MetricFamily::kSemanticSimilarity);
  CHECK(family(MetricId::kSelfConsistency) == MetricFamily::kLogicalInference);
  CHECK(family(MetricId::kGrammar) == MetricFamily::kLanguageCoherence);
}
