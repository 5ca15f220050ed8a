#include "reasonscore/chain.hpp"

#include <cstdint>

#include "reasonscore/error.hpp"

namespace reasonscore {
namespace {

struct Codepoint {
  char32_t value;
  std::size_t offset;  // byte offset in the source string
  std::size_t length;  // byte length
};

// Lenient UTF-8 decode: invalid bytes are passed through as single-byte
// codepoints so arbitrary input never throws here.
std::vector<Codepoint> decode_utf8(const std::string& text) {
  std::vector<Codepoint> cps;
  cps.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && i + 3 < text.size()) {
      cp = (b0 & 0x07u);
      len = 4;
    } else if (b0 >= 0xE0 && i + 2 < text.size()) {
      cp = (b0 & 0x0Fu);
      len = 3;
    } else if (b0 >= 0xC0 && i + 1 < text.size()) {
      cp = (b0 & 0x1Fu);
      len = 2;
    }
    if (len > 1) {
      bool valid = true;
      for (std::size_t k = 1; k < len; ++k) {
        const unsigned char bk = static_cast<unsigned char>(text[i + k]);
        if ((bk & 0xC0u) != 0x80u) {
          valid = false;
          break;
        }
        cp = (cp << 6) | (bk & 0x3Fu);
      }
      if (!valid) {
        cp = b0;
        len = 1;
      }
    }
    cps.push_back({cp, i, len});
    i += len;
  }
  return cps;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_peel_punct(char32_t cp) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
  }
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:  // curly quotes
    case 0x2013: case 0x2014:                            // dashes
    case 0x2026:                                         // ellipsis
    case 0x00A1: case 0x00BF:                            // inverted ! ?
      return true;
    default:
      return false;
  }
}

std::string trim_spaces(const std::string& text) {
  const auto cps = decode_utf8(text);
  std::size_t begin = 0, end = cps.size();
  while (begin < end && is_unicode_space(cps[begin].value)) ++begin;
  while (end > begin && is_unicode_space(cps[end - 1].value)) --end;
  if (begin == end) return "";
  const std::size_t from = cps[begin].offset;
  const std::size_t to = cps[end - 1].offset + cps[end - 1].length;
  return text.substr(from, to - from);
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  const auto cps = decode_utf8(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  const auto slice = [&](std::size_t from, std::size_t to) {
    const std::size_t a = cps[from].offset;
    const std::size_t b = cps[to - 1].offset + cps[to - 1].length;
    return text.substr(a, b - a);
  };
  while (i < cps.size()) {
    while (i < cps.size() && is_unicode_space(cps[i].value)) ++i;
    if (i >= cps.size()) break;
    std::size_t j = i;
    while (j < cps.size() && !is_unicode_space(cps[j].value)) ++j;
    // peel leading punctuation, each character its own token
    std::size_t lo = i, hi = j;
    while (lo < hi && is_peel_punct(cps[lo].value)) {
      tokens.push_back(slice(lo, lo + 1));
      ++lo;
    }
    // collect trailing punctuation without disturbing order
    std::size_t tail = hi;
    while (tail > lo && is_peel_punct(cps[tail - 1].value)) --tail;
    if (tail > lo) tokens.push_back(slice(lo, tail));
    for (std::size_t k = tail; k < hi; ++k) tokens.push_back(slice(k, k + 1));
    i = j;
  }
  if (tokens.empty()) fail(errc::empty_text, "cannot tokenize empty or whitespace-only text");
  return tokens;
}

std::vector<std::string> split_sentences(const std::string& text) {
  const auto cps = decode_utf8(text);
  if (cps.empty()) fail(errc::empty_text, "cannot split empty text");
  const auto is_terminator = [](char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?';
  };
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  const auto emit = [&](std::size_t from, std::size_t to) {
    if (from >= to) return;
    const std::size_t a = cps[from].offset;
    const std::size_t b = cps[to - 1].offset + cps[to - 1].length;
    const std::string s = trim_spaces(text.substr(a, b - a));
    if (!s.empty()) sentences.push_back(s);
  };
  while (i < cps.size()) {
    if (is_terminator(cps[i].value)) {
      std::size_t j = i;
      while (j < cps.size() && is_terminator(cps[j].value)) ++j;
      if (j >= cps.size() || is_unicode_space(cps[j].value)) {
        emit(start, j);
        while (j < cps.size() && is_unicode_space(cps[j].value)) ++j;
        start = j;
        i = j;
        continue;
      }
      i = j;
      continue;
    }
    ++i;
  }
  emit(start, cps.size());
  if (sentences.empty()) fail(errc::empty_text, "no sentences in input");
  return sentences;
}

std::string join_chain(const std::vector<std::string>& steps) {
  if (steps.empty()) fail(errc::empty_chain, "cannot join an empty chain");
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += steps[i];
  }
  return out;
}

Step::Step(std::string text) : text_(std::move(text)) {
  if (trim_spaces(text_).empty())
    fail(errc::empty_text, "step text is empty after trimming");
  tokens_ = tokenize(text_);
}

std::vector<Step> make_steps(const std::vector<std::string>& texts) {
  std::vector<Step> steps;
  steps.reserve(texts.size());
  for (const auto& t : texts) steps.emplace_back(t);
  return steps;
}

std::vector<std::string> step_texts(const std::vector<Step>& steps) {
  std::vector<std::string> texts;
  texts.reserve(steps.size());
  for (const auto& s : steps) texts.push_back(s.text());
  return texts;
}

std::string join_chain(const std::vector<Step>& steps) {
  return join_chain(step_texts(steps));
}

std::string_view to_string(ErrorType type) {
  switch (type) {
    case ErrorType::kGrammar: return "grammar";
    case ErrorType::kFactuality: return "factuality";
    case ErrorType::kHallucination: return "hallucination";
    case ErrorType::kRedundancy: return "redundancy";
    case ErrorType::kRepetition: return "repetition";
    case ErrorType::kMissingStep: return "missing_step";
    case ErrorType::kCoherency: return "coherency";
    case ErrorType::kCommonsense: return "commonsense";
    case ErrorType::kArithmetic: return "arithmetic";
  }
  return "";
}

std::optional<ErrorType> error_type_from_string(std::string_view name) {
  for (ErrorType t : kAllErrorTypes) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

ReasoningChain::ReasoningChain(std::string id, std::vector<Sentence> source,
                               std::vector<Step> hypothesis,
                               std::optional<std::vector<Step>> reference,
                               std::optional<ErrorLabels> labels,
                               std::vector<std::string> perturbations)
    : id_(std::move(id)),
      source_(std::move(source)),
      hypothesis_(std::move(hypothesis)),
      reference_(std::move(reference)),
      labels_(std::move(labels)),
      perturbations_(std::move(perturbations)) {
  if (source_.empty()) fail(errc::empty_chain, "chain source must be non-empty");
  if (hypothesis_.empty()) fail(errc::empty_chain, "chain hypothesis must be non-empty");
  if (reference_ && reference_->empty())
    fail(errc::empty_chain, "chain reference, when present, must be non-empty");
}

void ScoreReport::set(MetricId id, double value) {
  if (!(value >= 0.0 && value <= 1.0))
    fail(errc::schema, "score outside [0,1] for metric " + std::string(to_string(id)));
  scores_[id] = value;
  orientations_[id] = orientation(id);
}

void ScoreReport::set_not_applicable(MetricId id) {
  orientations_[id] = orientation(id);
  for (MetricId m : not_applicable_) {
    if (m == id) return;
  }
  not_applicable_.push_back(id);
}

std::optional<double> ScoreReport::value(MetricId id) const {
  const auto it = scores_.find(id);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

bool ScoreReport::is_not_applicable(MetricId id) const {
  for (MetricId m : not_applicable_) {
    if (m == id) return true;
  }
  return false;
}

bool ScoreReport::has(MetricId id) const {
  return orientations_.count(id) > 0;
}

}  // namespace reasonscore
