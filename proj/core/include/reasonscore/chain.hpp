#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reasonscore/metric.hpp"

namespace reasonscore {

using Token = std::string;

/// Splits on Unicode whitespace, then peels leading/trailing punctuation
/// characters into their own tokens. No lowercasing. Deterministic and
/// idempotent on its own output. Throws empty_text on whitespace-only input.
std::vector<Token> tokenize(const std::string& text);

/// Fallback segmentation on sentence-final . ! ? followed by whitespace.
/// Abbreviations are not handled; pre-segmented input should bypass this.
std::vector<std::string> split_sentences(const std::string& text);

/// Joins step texts with exactly one U+0020 between them.
std::string join_chain(const std::vector<std::string>& steps);

/// One hypothesis step or source sentence: the text plus its cached
/// canonical tokens.
class Step {
 public:
  explicit Step(std::string text);

  const std::string& text() const noexcept { return text_; }
  const std::vector<Token>& tokens() const noexcept { return tokens_; }

  bool operator==(const Step& other) const { return text_ == other.text_; }

 private:
  std::string text_;
  std::vector<Token> tokens_;
};

using Sentence = Step;

std::vector<Step> make_steps(const std::vector<std::string>& texts);
std::vector<std::string> step_texts(const std::vector<Step>& steps);
std::string join_chain(const std::vector<Step>& steps);

/// The nine-way reasoning error taxonomy.
enum class ErrorType {
  kGrammar,
  kFactuality,
  kHallucination,
  kRedundancy,
  kRepetition,
  kMissingStep,
  kCoherency,
  kCommonsense,
  kArithmetic,
};

inline constexpr std::array<ErrorType, 9> kAllErrorTypes = {
    ErrorType::kGrammar,     ErrorType::kFactuality, ErrorType::kHallucination,
    ErrorType::kRedundancy,  ErrorType::kRepetition, ErrorType::kMissingStep,
    ErrorType::kCoherency,   ErrorType::kCommonsense, ErrorType::kArithmetic,
};

std::string_view to_string(ErrorType type);
std::optional<ErrorType> error_type_from_string(std::string_view name);

using ErrorLabels = std::map<ErrorType, bool>;

/// One scoring instance: a T-sentence source context, an N-step hypothesis
/// chain (final answer last), and optionally a K-step gold reference plus
/// error labels. Immutable after construction; safe to share across threads.
class ReasoningChain {
 public:
  ReasoningChain(std::string id, std::vector<Sentence> source,
                 std::vector<Step> hypothesis,
                 std::optional<std::vector<Step>> reference = std::nullopt,
                 std::optional<ErrorLabels> labels = std::nullopt,
                 std::vector<std::string> perturbations = {});

  const std::string& id() const noexcept { return id_; }
  const std::vector<Sentence>& source() const noexcept { return source_; }
  const std::vector<Step>& hypothesis() const noexcept { return hypothesis_; }
  const std::optional<std::vector<Step>>& reference() const noexcept { return reference_; }
  const std::optional<ErrorLabels>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& perturbations() const noexcept { return perturbations_; }

  bool has_reference() const noexcept { return reference_.has_value(); }

  /// Unknown JSONL fields, kept verbatim as a serialized JSON object so
  /// read -> write round-trips preserve them.
  const std::string& extra_json() const noexcept { return extra_json_; }
  void set_extra_json(std::string extra) { extra_json_ = std::move(extra); }

 private:
  std::string id_;
  std::vector<Sentence> source_;
  std::vector<Step> hypothesis_;
  std::optional<std::vector<Step>> reference_;
  std::optional<ErrorLabels> labels_;
  std::vector<std::string> perturbations_;
  std::string extra_json_;
};

/// Per-chain metric values. Insertion validates the [0,1] range; every
/// recorded metric (including not-applicable ones) carries its orientation.
class ScoreReport {
 public:
  explicit ScoreReport(std::string chain_id) : chain_id_(std::move(chain_id)) {}

  const std::string& chain_id() const noexcept { return chain_id_; }

  void set(MetricId id, double value);
  void set_not_applicable(MetricId id);

  /// Value if recorded and applicable, otherwise nullopt.
  std::optional<double> value(MetricId id) const;
  bool is_not_applicable(MetricId id) const;
  bool has(MetricId id) const;

  const std::map<MetricId, double>& scores() const noexcept { return scores_; }
  const std::map<MetricId, Orientation>& orientations() const noexcept { return orientations_; }
  const std::vector<MetricId>& not_applicable() const noexcept { return not_applicable_; }

 private:
  std::string chain_id_;
  std::map<MetricId, double> scores_;
  std::map<MetricId, Orientation> orientations_;
  std::vector<MetricId> not_applicable_;
};

}  // namespace reasonscore
