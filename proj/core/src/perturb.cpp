#include "reasonscore/perturb.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "json.hpp"
#include "reasonscore/error.hpp"
#include "reasonscore/rng.hpp"

namespace reasonscore {
namespace {

using nlohmann::json;

constexpr int kResampleCap = 64;

[[noreturn]] void inapplicable(const std::string& why) {
  fail(errc::rule_inapplicable, why);
}

// ---- text utilities --------------------------------------------------------

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
         (c >= '{' && c <= '~');
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// A whitespace-delimited chunk of a step, plus its punctuation-stripped core.
struct Chunk {
  std::size_t start = 0, len = 0;
  std::size_t core_start = 0, core_len = 0;
};

std::vector<Chunk> chunk_words(const std::string& text) {
  std::vector<Chunk> chunks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !is_ascii_space(text[j])) ++j;
    Chunk c{i, j - i, i, j - i};
    while (c.core_len > 0 && is_ascii_punct(text[c.core_start])) {
      ++c.core_start;
      --c.core_len;
    }
    while (c.core_len > 0 && is_ascii_punct(text[c.core_start + c.core_len - 1])) --c.core_len;
    chunks.push_back(c);
    i = j;
  }
  return chunks;
}

std::string chunk_text(const std::string& text, const Chunk& c) {
  return text.substr(c.start, c.len);
}

std::string chunk_core(const std::string& text, const Chunk& c) {
  return text.substr(c.core_start, c.core_len);
}

std::string replace_range(const std::string& text, std::size_t start, std::size_t len,
                          std::string_view replacement) {
  std::string out = text.substr(0, start);
  out += replacement;
  out += text.substr(start + len);
  return out;
}

std::string match_case(const std::string& pattern, std::string word) {
  if (!pattern.empty() && !word.empty() &&
      std::isupper(static_cast<unsigned char>(pattern[0])))
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

struct Occurrence {
  std::size_t step = 0;
  std::size_t start = 0, len = 0;
  std::string text;
};

std::vector<Occurrence> find_numbers(const std::vector<std::string>& steps) {
  std::vector<Occurrence> out;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const std::string& t = steps[s];
    std::size_t i = 0;
    while (i < t.size()) {
      if (std::isdigit(static_cast<unsigned char>(t[i]))) {
        std::size_t j = i;
        while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
        if (j + 1 < t.size() && t[j] == '.' &&
            std::isdigit(static_cast<unsigned char>(t[j + 1]))) {
          ++j;
          while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
        }
        out.push_back({s, i, j - i, t.substr(i, j - i)});
        i = j;
      } else {
        ++i;
      }
    }
  }
  return out;
}

// + - * / and U+2212 (minus sign); '=' only evidences equations and is never
// permuted or replaced.
std::vector<Occurrence> find_operators(const std::vector<std::string>& steps) {
  static const std::string kMinusSign = "\xE2\x88\x92";
  std::vector<Occurrence> out;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const std::string& t = steps[s];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const char c = t[i];
      if (c == '+' || c == '-' || c == '*' || c == '/') {
        out.push_back({s, i, 1, std::string(1, c)});
      } else if (i + 2 < t.size() && t.compare(i, 3, kMinusSign) == 0) {
        out.push_back({s, i, 3, kMinusSign});
        i += 2;
      }
    }
  }
  return out;
}

/// Replaces occurrences within the steps; `replacements[k]` substitutes
/// occurrence k. Splices right to left so recorded offsets stay valid.
void splice_occurrences(std::vector<std::string>& steps,
                        const std::vector<Occurrence>& occurrences,
                        const std::vector<std::string>& replacements) {
  for (std::size_t k = occurrences.size(); k > 0; --k) {
    const Occurrence& occ = occurrences[k - 1];
    steps[occ.step] = replace_range(steps[occ.step], occ.start, occ.len, replacements[k - 1]);
  }
}

// ---- negation and grammar rule tables --------------------------------------

const std::vector<std::string>& auxiliary_words() {
  static const std::vector<std::string> kAux = {
      "is",  "are",  "was",  "were",  "am",   "has",  "have",   "had",  "does", "do",
      "did", "can",  "could", "will", "would", "shall", "should", "may", "might", "must"};
  return kAux;
}

const std::map<std::string, std::string>& contraction_map() {
  static const std::map<std::string, std::string> kMap = {
      {"isn't", "is"},       {"aren't", "are"},   {"wasn't", "was"},
      {"weren't", "were"},   {"hasn't", "has"},   {"haven't", "have"},
      {"hadn't", "had"},     {"doesn't", "does"}, {"don't", "do"},
      {"didn't", "did"},     {"can't", "can"},    {"cannot", "can"},
      {"couldn't", "could"}, {"won't", "will"},   {"wouldn't", "would"},
      {"shan't", "shall"},   {"shouldn't", "should"}, {"mightn't", "might"},
      {"mustn't", "must"}};
  return kMap;
}

const std::map<std::string, std::string>& tense_map() {
  static const std::map<std::string, std::string> kMap = {
      {"is", "was"},     {"was", "is"},     {"are", "were"},  {"were", "are"},
      {"am", "was"},     {"has", "had"},    {"had", "has"},   {"have", "had"},
      {"do", "did"},     {"does", "did"},   {"did", "does"},  {"can", "could"},
      {"could", "can"},  {"will", "would"}, {"would", "will"}, {"may", "might"},
      {"might", "may"},  {"shall", "should"}, {"should", "shall"}};
  return kMap;
}

bool is_auxiliary(const std::string& core_lower) {
  const auto& aux = auxiliary_words();
  return std::find(aux.begin(), aux.end(), core_lower) != aux.end();
}

struct NegationPlan {
  enum class Kind { kExpandContraction, kDropNot, kInsertNot, kInsertDoesNot };
  Kind kind;
  std::size_t chunk = 0;
  std::string_view name() const {
    switch (kind) {
      case Kind::kExpandContraction: return "expand_contraction";
      case Kind::kDropNot: return "drop_not";
      case Kind::kInsertNot: return "insert_not";
      case Kind::kInsertDoesNot: return "insert_does_not";
    }
    return "";
  }
};

std::optional<NegationPlan> negation_plan(const std::string& text) {
  const auto chunks = chunk_words(text);
  for (std::size_t k = 0; k < chunks.size(); ++k) {
    if (contraction_map().count(lower(chunk_core(text, chunks[k]))))
      return NegationPlan{NegationPlan::Kind::kExpandContraction, k};
  }
  for (std::size_t k = 0; k + 1 < chunks.size(); ++k) {
    if (is_auxiliary(lower(chunk_core(text, chunks[k]))) &&
        lower(chunk_core(text, chunks[k + 1])) == "not")
      return NegationPlan{NegationPlan::Kind::kDropNot, k + 1};
  }
  for (std::size_t k = 0; k < chunks.size(); ++k) {
    if (is_auxiliary(lower(chunk_core(text, chunks[k]))))
      return NegationPlan{NegationPlan::Kind::kInsertNot, k};
  }
  if (chunks.size() >= 2) {
    const std::string core = chunk_core(text, chunks[1]);
    const bool alphabetic = !core.empty() &&
        std::all_of(core.begin(), core.end(), [](unsigned char c) { return std::isalpha(c); });
    if (alphabetic) return NegationPlan{NegationPlan::Kind::kInsertDoesNot, 1};
  }
  return std::nullopt;
}

std::string apply_negation(const std::string& text, const NegationPlan& plan) {
  const auto chunks = chunk_words(text);
  const Chunk& c = chunks[plan.chunk];
  switch (plan.kind) {
    case NegationPlan::Kind::kExpandContraction: {
      const std::string core = chunk_core(text, c);
      const std::string base = contraction_map().at(lower(core));
      return replace_range(text, c.core_start, c.core_len, match_case(core, base));
    }
    case NegationPlan::Kind::kDropNot: {
      // delete the "not" chunk and the space before it
      std::size_t start = c.start;
      std::size_t len = c.len;
      if (start > 0 && is_ascii_space(text[start - 1])) {
        --start;
        ++len;
      }
      return replace_range(text, start, len, "");
    }
    case NegationPlan::Kind::kInsertNot:
      return replace_range(text, c.core_start + c.core_len, 0, " not");
    case NegationPlan::Kind::kInsertDoesNot:
      return replace_range(text, c.start, 0, "does not ");
  }
  return text;
}

// ---- the rule handlers ------------------------------------------------------

/// Step list plus shields. A shielded step is a corruption artifact from an
/// earlier rule in the same sequence (a duplicate pair, an appended
/// hallucination, a rewritten step); RemoveStep skips shielded positions so
/// that stacking rules accumulates errors instead of undoing them.
struct ChainState {
  std::vector<std::string> steps;
  std::vector<bool> shields;

  explicit ChainState(std::vector<std::string> s)
      : steps(std::move(s)), shields(steps.size(), false) {}
};

json handle_repeat(ChainState& state, SplitMix64& rng) {
  const std::size_t idx = static_cast<std::size_t>(rng.next_below(state.steps.size()));
  state.steps.insert(state.steps.begin() + idx + 1, state.steps[idx]);
  state.shields.insert(state.shields.begin() + idx + 1, true);
  state.shields[idx] = true;
  return json{{"index", idx}};
}

json handle_remove(ChainState& state, SplitMix64& rng) {
  if (state.steps.size() < 2) inapplicable("RemoveStep would empty the chain");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < state.steps.size(); ++i) {
    if (!state.shields[i]) candidates.push_back(i);
  }
  if (candidates.empty()) inapplicable("RemoveStep has only shielded steps left");
  const std::size_t idx = candidates[rng.next_below(candidates.size())];
  state.steps.erase(state.steps.begin() + idx);
  state.shields.erase(state.shields.begin() + idx);
  return json{{"index", idx}};
}

json handle_shuffle_steps(ChainState& state, SplitMix64& rng) {
  const std::size_t n = state.steps.size();
  if (n < 2) inapplicable("ShuffleSteps needs at least two steps");
  for (int attempt = 0; attempt < kResampleCap; ++attempt) {
    const auto perm = random_permutation(n, rng);
    bool identity = true;
    for (std::size_t i = 0; i < n; ++i) identity = identity && perm[i] == i;
    if (identity) continue;
    std::vector<std::string> steps(n);
    std::vector<bool> shields(n);
    for (std::size_t i = 0; i < n; ++i) {
      steps[i] = state.steps[perm[i]];
      shields[i] = state.shields[perm[i]];
    }
    if (steps == state.steps) continue;  // permuted equal texts back into place
    state.steps = std::move(steps);
    state.shields = std::move(shields);
    return json{{"perm", perm}};
  }
  inapplicable("ShuffleSteps cannot change a chain of identical steps");
}

json handle_swap(ChainState& state, SplitMix64& rng, const PerturbOptions& options) {
  const std::size_t n = state.steps.size();
  if (n < 2) inapplicable("SwapStep needs at least two steps");
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j_end = options.adjacent_swap_only ? std::min(n, i + 2) : n;
    for (std::size_t j = i + 1; j < j_end; ++j) {
      if (state.steps[i] != state.steps[j]) candidates.emplace_back(i, j);
    }
  }
  if (candidates.empty()) inapplicable("SwapStep has no differing positions to swap");
  const auto [i, j] = candidates[rng.next_below(candidates.size())];
  std::swap(state.steps[i], state.steps[j]);
  const bool tmp = state.shields[i];
  state.shields[i] = state.shields[j];
  state.shields[j] = tmp;
  return json{{"i", i}, {"j", j}};
}

json handle_negate(ChainState& state, SplitMix64& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < state.steps.size(); ++i) {
    if (negation_plan(state.steps[i])) candidates.push_back(i);
  }
  if (candidates.empty()) inapplicable("NegateStep matched no step in the rule table");
  const std::size_t idx = candidates[rng.next_below(candidates.size())];
  const auto plan = negation_plan(state.steps[idx]);
  state.steps[idx] = apply_negation(state.steps[idx], *plan);
  state.shields[idx] = true;
  return json{{"index", idx}, {"action", plan->name()}};
}

json handle_hallucination(ChainState& state, SplitMix64& rng, const StepPool* pool) {
  if (pool == nullptr || pool->steps.empty())
    inapplicable("Hallucination needs a non-empty corpus pool");
  const std::string& step = pool->steps[rng.next_below(pool->steps.size())];
  state.steps.push_back(step);
  state.shields.push_back(true);
  return json{{"step", step}};
}

json handle_grammar(ChainState& state, SplitMix64& rng) {
  struct Candidate {
    std::size_t step;
    int kind;  // 0 tense, 1 drop, 2 swap
    std::size_t chunk;
  };
  std::vector<Candidate> candidates;
  for (std::size_t s = 0; s < state.steps.size(); ++s) {
    const std::string& text = state.steps[s];
    const auto chunks = chunk_words(text);
    for (std::size_t k = 0; k < chunks.size(); ++k) {
      const std::string core = chunk_core(text, chunks[k]);
      const std::string low = lower(core);
      const bool all_alpha = !core.empty() &&
          std::all_of(core.begin(), core.end(),
                      [](unsigned char c) { return std::isalpha(c); });
      if (tense_map().count(low) ||
          (all_alpha && core.size() >= 4 &&
           (low.ends_with("ing") || low.ends_with("ed"))) ||
          (all_alpha && core.size() >= 3 && low.ends_with("s") && !low.ends_with("ss")))
        candidates.push_back({s, 0, k});
      if (chunks.size() >= 2 &&
          (is_auxiliary(low) || low == "be" || low == "been" || low == "being" ||
           (chunks.size() >= 3 && k == 1)))
        candidates.push_back({s, 1, k});
      if (k + 1 < chunks.size() &&
          chunk_text(text, chunks[k]) != chunk_text(text, chunks[k + 1]))
        candidates.push_back({s, 2, k});
    }
  }
  if (candidates.empty()) inapplicable("GrammarError found nothing to corrupt");
  // choose the corruption kind uniformly among those that apply, then a
  // uniform site of that kind
  std::vector<int> kinds;
  for (int kind = 0; kind < 3; ++kind) {
    if (std::any_of(candidates.begin(), candidates.end(),
                    [kind](const Candidate& c) { return c.kind == kind; }))
      kinds.push_back(kind);
  }
  const int kind = kinds[rng.next_below(kinds.size())];
  std::vector<Candidate> of_kind;
  for (const Candidate& c : candidates) {
    if (c.kind == kind) of_kind.push_back(c);
  }
  const Candidate chosen = of_kind[rng.next_below(of_kind.size())];
  std::string& text = state.steps[chosen.step];
  const auto chunks = chunk_words(text);
  const Chunk& c = chunks[chosen.chunk];
  const std::string core = chunk_core(text, c);
  const std::string low = lower(core);
  const char* kind_name = kind == 0 ? "tense" : kind == 1 ? "drop" : "swap";
  if (kind == 0) {
    std::string replacement;
    if (const auto it = tense_map().find(low); it != tense_map().end()) {
      replacement = it->second;
    } else if (low.ends_with("ing")) {
      replacement = low.substr(0, low.size() - 3) + "ed";
    } else if (low.ends_with("ed")) {
      replacement = low.substr(0, low.size() - 2) + "ing";
    } else {
      replacement = low.substr(0, low.size() - 1) + "ed";
    }
    text = replace_range(text, c.core_start, c.core_len, match_case(core, replacement));
  } else if (kind == 1) {
    std::size_t start = c.start, len = c.len;
    if (start > 0 && is_ascii_space(text[start - 1])) {
      --start;
      ++len;
    } else if (start + len < text.size() && is_ascii_space(text[start + len])) {
      ++len;
    }
    text = replace_range(text, start, len, "");
    if (text.find_first_not_of(" \t") == std::string::npos)
      inapplicable("GrammarError drop would empty the step");
  } else {
    const Chunk& d = chunks[chosen.chunk + 1];
    const std::string left = chunk_text(text, c);
    const std::string right = chunk_text(text, d);
    std::string out = text.substr(0, c.start);
    out += right;
    out += text.substr(c.start + c.len, d.start - (c.start + c.len));
    out += left;
    out += text.substr(d.start + d.len);
    text = std::move(out);
  }
  state.shields[chosen.step] = true;
  return json{{"index", chosen.step}, {"kind", kind_name}, {"chunk", chosen.chunk}};
}

json handle_semantic_change(ChainState& state, SplitMix64& rng, const StepPool* pool) {
  if (pool == nullptr || pool->entities.empty())
    inapplicable("SemanticChange needs a corpus entity pool");
  struct Site {
    std::size_t step, chunk;
    std::string core;
  };
  std::vector<Site> sites;
  for (std::size_t s = 0; s < state.steps.size(); ++s) {
    const std::string& text = state.steps[s];
    const auto chunks = chunk_words(text);
    for (std::size_t k = 1; k < chunks.size(); ++k) {
      const std::string core = chunk_core(text, chunks[k]);
      if (!core.empty() && std::isupper(static_cast<unsigned char>(core[0])))
        sites.push_back({s, k, core});
    }
  }
  if (sites.empty()) inapplicable("SemanticChange found no entity-like token");
  const Site site = sites[rng.next_below(sites.size())];
  std::vector<std::string> replacements;
  for (const std::string& e : pool->entities) {
    if (e != site.core) replacements.push_back(e);
  }
  if (replacements.empty()) inapplicable("SemanticChange has no differing entity");
  const std::string entity = replacements[rng.next_below(replacements.size())];
  const auto chunks = chunk_words(state.steps[site.step]);
  const Chunk& c = chunks[site.chunk];
  state.steps[site.step] = replace_range(state.steps[site.step], c.core_start, c.core_len, entity);
  state.shields[site.step] = true;
  return json{{"step_index", site.step}, {"chunk", site.chunk}, {"entity", entity}};
}

json handle_shuffle_numbers(ChainState& state, SplitMix64& rng) {
  const auto occurrences = find_numbers(state.steps);
  if (occurrences.size() < 2) inapplicable("ShuffleNumbers needs at least two numbers");
  for (int attempt = 0; attempt < kResampleCap; ++attempt) {
    const auto perm = random_permutation(occurrences.size(), rng);
    std::vector<std::string> replacements(occurrences.size());
    bool changed = false;
    for (std::size_t k = 0; k < occurrences.size(); ++k) {
      replacements[k] = occurrences[perm[k]].text;
      changed = changed || replacements[k] != occurrences[k].text;
    }
    if (!changed) continue;
    std::vector<std::string> before = state.steps;
    splice_occurrences(state.steps, occurrences, replacements);
    for (std::size_t s = 0; s < state.steps.size(); ++s) {
      if (state.steps[s] != before[s]) state.shields[s] = true;
    }
    return json{{"perm", perm}};
  }
  inapplicable("ShuffleNumbers cannot change identical numbers");
}

json handle_shuffle_operations(ChainState& state, SplitMix64& rng) {
  const auto occurrences = find_operators(state.steps);
  if (occurrences.size() < 2) inapplicable("ShuffleOperations needs at least two operators");
  for (int attempt = 0; attempt < kResampleCap; ++attempt) {
    const auto perm = random_permutation(occurrences.size(), rng);
    std::vector<std::string> replacements(occurrences.size());
    bool changed = false;
    for (std::size_t k = 0; k < occurrences.size(); ++k) {
      replacements[k] = occurrences[perm[k]].text;
      changed = changed || replacements[k] != occurrences[k].text;
    }
    if (!changed) continue;
    std::vector<std::string> before = state.steps;
    splice_occurrences(state.steps, occurrences, replacements);
    for (std::size_t s = 0; s < state.steps.size(); ++s) {
      if (state.steps[s] != before[s]) state.shields[s] = true;
    }
    return json{{"perm", perm}};
  }
  inapplicable("ShuffleOperations cannot change identical operators");
}

json handle_random_number(ChainState& state, SplitMix64& rng) {
  const auto occurrences = find_numbers(state.steps);
  if (occurrences.empty()) inapplicable("RandomNumber needs a numeric literal");
  const std::size_t k = static_cast<std::size_t>(rng.next_below(occurrences.size()));
  const Occurrence& occ = occurrences[k];
  std::string replacement;
  for (int attempt = 0; attempt < kResampleCap; ++attempt) {
    replacement = std::to_string(rng.next_below(101));
    if (replacement != occ.text) break;
    replacement.clear();
  }
  if (replacement.empty()) inapplicable("RandomNumber could not draw a new value");
  state.steps[occ.step] = replace_range(state.steps[occ.step], occ.start, occ.len, replacement);
  state.shields[occ.step] = true;
  return json{{"occurrence", k}, {"value", replacement}};
}

json handle_random_operation(ChainState& state, SplitMix64& rng) {
  const auto occurrences = find_operators(state.steps);
  if (occurrences.empty()) inapplicable("RandomOperation needs a math operator");
  const std::size_t k = static_cast<std::size_t>(rng.next_below(occurrences.size()));
  const Occurrence& occ = occurrences[k];
  const char current = occ.text == "\xE2\x88\x92" ? '-' : occ.text[0];
  std::string choices;
  for (char c : {'+', '-', '*', '/'}) {
    if (c != current) choices.push_back(c);
  }
  const char replacement = choices[rng.next_below(choices.size())];
  state.steps[occ.step] =
      replace_range(state.steps[occ.step], occ.start, occ.len, std::string(1, replacement));
  state.shields[occ.step] = true;
  return json{{"occurrence", k}, {"op", std::string(1, replacement)}};
}

json dispatch_rule(ChainState& state, PerturbationRule rule, SplitMix64& rng,
                   const StepPool* pool, const PerturbOptions& options) {
  switch (rule) {
    case PerturbationRule::kRepeatStep: return handle_repeat(state, rng);
    case PerturbationRule::kRemoveStep: return handle_remove(state, rng);
    case PerturbationRule::kShuffleSteps: return handle_shuffle_steps(state, rng);
    case PerturbationRule::kSwapStep: return handle_swap(state, rng, options);
    case PerturbationRule::kNegateStep: return handle_negate(state, rng);
    case PerturbationRule::kHallucination: return handle_hallucination(state, rng, pool);
    case PerturbationRule::kGrammarError: return handle_grammar(state, rng);
    case PerturbationRule::kSemanticChange: return handle_semantic_change(state, rng, pool);
    case PerturbationRule::kShuffleNumbers: return handle_shuffle_numbers(state, rng);
    case PerturbationRule::kShuffleOperations: return handle_shuffle_operations(state, rng);
    case PerturbationRule::kRandomNumber: return handle_random_number(state, rng);
    case PerturbationRule::kRandomOperation: return handle_random_operation(state, rng);
  }
  inapplicable("unknown rule");
}

/// Applies `rule` to `state` in place with randomness from `seed`.
AppliedPerturbation apply_to_state(ChainState& state, PerturbationRule rule,
                                   std::uint64_t seed, const StepPool* pool,
                                   const PerturbOptions& options) {
  SplitMix64 rng(seed);
  const json params = dispatch_rule(state, rule, rng, pool, options);
  return AppliedPerturbation{rule, seed, params.dump()};
}

}  // namespace

std::string_view to_string(PerturbationRule rule) {
  switch (rule) {
    case PerturbationRule::kRepeatStep: return "repeat_step";
    case PerturbationRule::kRemoveStep: return "remove_step";
    case PerturbationRule::kShuffleSteps: return "shuffle_steps";
    case PerturbationRule::kSwapStep: return "swap_step";
    case PerturbationRule::kNegateStep: return "negate_step";
    case PerturbationRule::kHallucination: return "hallucination";
    case PerturbationRule::kGrammarError: return "grammar_error";
    case PerturbationRule::kSemanticChange: return "semantic_change";
    case PerturbationRule::kShuffleNumbers: return "shuffle_numbers";
    case PerturbationRule::kShuffleOperations: return "shuffle_operations";
    case PerturbationRule::kRandomNumber: return "random_number";
    case PerturbationRule::kRandomOperation: return "random_operation";
  }
  return "";
}

std::optional<PerturbationRule> rule_from_string(std::string_view name) {
  for (PerturbationRule rule : kAllRules) {
    if (to_string(rule) == name) return rule;
  }
  return std::nullopt;
}

ErrorType error_type(PerturbationRule rule) {
  switch (rule) {
    case PerturbationRule::kRepeatStep: return ErrorType::kRepetition;
    case PerturbationRule::kRemoveStep: return ErrorType::kMissingStep;
    case PerturbationRule::kShuffleSteps: return ErrorType::kCoherency;
    case PerturbationRule::kSwapStep: return ErrorType::kCoherency;
    case PerturbationRule::kNegateStep: return ErrorType::kFactuality;
    case PerturbationRule::kHallucination: return ErrorType::kHallucination;
    case PerturbationRule::kGrammarError: return ErrorType::kGrammar;
    case PerturbationRule::kSemanticChange: return ErrorType::kFactuality;
    case PerturbationRule::kShuffleNumbers: return ErrorType::kArithmetic;
    case PerturbationRule::kShuffleOperations: return ErrorType::kArithmetic;
    case PerturbationRule::kRandomNumber: return ErrorType::kArithmetic;
    case PerturbationRule::kRandomOperation: return ErrorType::kArithmetic;
  }
  return ErrorType::kCoherency;
}

StepPool build_pool(std::span<const ReasoningChain> corpus, std::string_view exclude_chain_id) {
  StepPool pool;
  for (const ReasoningChain& chain : corpus) {
    if (chain.id() == exclude_chain_id) continue;
    const std::vector<Step>& steps =
        chain.has_reference() ? *chain.reference() : chain.hypothesis();
    for (const Step& step : steps) {
      pool.steps.push_back(step.text());
      const auto chunks = chunk_words(step.text());
      for (std::size_t k = 1; k < chunks.size(); ++k) {
        const std::string core = chunk_core(step.text(), chunks[k]);
        if (!core.empty() && std::isupper(static_cast<unsigned char>(core[0])))
          pool.entities.push_back(core);
      }
    }
  }
  return pool;
}

ApplyOutcome apply_rule(const std::vector<std::string>& steps, PerturbationRule rule,
                        std::uint64_t seed, const StepPool* pool,
                        const PerturbOptions& options) {
  if (steps.empty()) fail(errc::empty_chain, "cannot perturb an empty chain");
  ChainState state(steps);
  AppliedPerturbation applied = apply_to_state(state, rule, seed, pool, options);
  return ApplyOutcome{std::move(state.steps), std::move(applied)};
}

ReasoningChain PerturbedChain::to_chain() const {
  ErrorLabels labels;
  for (ErrorType t : kAllErrorTypes) labels[t] = false;
  std::vector<std::string> tags;
  for (const AppliedPerturbation& a : applied) {
    labels[error_type(a.rule)] = true;
    tags.emplace_back(to_string(a.rule));
  }
  ReasoningChain chain(base.id(), base.source(), make_steps(hypothesis),
                       base.reference(), labels, std::move(tags));
  json extra = base.extra_json().empty() ? json::object() : json::parse(base.extra_json());
  if (!applied.empty()) {
    json record = json::array();
    for (const AppliedPerturbation& a : applied) {
      record.push_back({{"rule", std::string(to_string(a.rule))},
                        {"seed", a.seed},
                        {"params", json::parse(a.params_json)}});
    }
    extra["applied"] = std::move(record);
  }
  if (!extra.empty()) chain.set_extra_json(extra.dump());
  return chain;
}

std::vector<AppliedPerturbation> applied_from_chain(const ReasoningChain& chain) {
  std::vector<AppliedPerturbation> out;
  if (chain.extra_json().empty()) return out;
  const json extra = json::parse(chain.extra_json());
  if (!extra.contains("applied")) return out;
  for (const json& entry : extra["applied"]) {
    const auto rule = rule_from_string(entry.at("rule").get<std::string>());
    if (!rule) fail(errc::schema, "unknown rule in applied record");
    out.push_back({*rule, entry.at("seed").get<std::uint64_t>(),
                   entry.value("params", json::object()).dump()});
  }
  return out;
}

std::vector<PerturbedChain> build_diagnostics(std::span<const ReasoningChain> dataset,
                                              std::span<const PerturbationRule> rules,
                                              double fraction, std::uint64_t seed,
                                              const PerturbOptions& options) {
  if (dataset.empty()) fail(errc::empty_chain, "diagnostics need at least one chain");
  if (rules.empty()) fail(errc::perturbation_infeasible, "no perturbation rules selected");
  if (!(fraction > 0.0 && fraction < 1.0))
    fail(errc::config, "fraction must lie in (0,1)");
  for (const ReasoningChain& chain : dataset) {
    if (!chain.has_reference())
      fail(errc::no_reference, "chain " + chain.id() + " has no reference");
  }
  const std::size_t n = dataset.size();
  const std::size_t target =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  SplitMix64 selector(derive_seed(seed, "diagnostics-selection"));
  const auto order = random_permutation(n, selector);

  std::vector<PerturbedChain> out;
  out.reserve(n);
  for (const ReasoningChain& chain : dataset)
    out.push_back(PerturbedChain{chain, step_texts(*chain.reference()), {}});

  std::size_t perturbed = 0;
  for (const std::size_t idx : order) {
    if (perturbed >= target) break;
    const ReasoningChain& chain = dataset[idx];
    const StepPool pool = build_pool(dataset, chain.id());
    SplitMix64 rng(derive_seed(seed, chain.id()));
    std::vector<PerturbationRule> rule_order(rules.begin(), rules.end());
    shuffle(rule_order, rng);
    for (const PerturbationRule rule : rule_order) {
      const std::uint64_t attempt_seed = rng.next();
      try {
        ApplyOutcome outcome =
            apply_rule(out[idx].hypothesis, rule, attempt_seed, &pool, options);
        out[idx].hypothesis = std::move(outcome.steps);
        out[idx].applied.push_back(std::move(outcome.applied));
        ++perturbed;
        break;
      } catch (const Error& e) {
        if (e.code() != errc::rule_inapplicable) throw;
      }
    }
    // if no rule applied, the chain stays clean and a later candidate is used
  }
  if (perturbed < target)
    fail(errc::perturbation_infeasible,
         "only " + std::to_string(perturbed) + " of " + std::to_string(target) +
             " chains could be perturbed with the selected rules");
  return out;
}

std::vector<std::pair<int, PerturbedChain>> inject_levels(
    const ReasoningChain& chain, int max_level, std::uint64_t seed,
    const StepPool& pool, std::span<const PerturbationRule> rules,
    const PerturbOptions& options) {
  if (!chain.has_reference())
    fail(errc::no_reference, "inject_levels needs a reference chain");
  if (max_level < 1 || max_level > 3)
    fail(errc::config, "max_level must lie in [1,3]");
  if (rules.empty()) fail(errc::perturbation_infeasible, "no perturbation rules selected");

  const std::vector<std::string> reference = step_texts(*chain.reference());
  SplitMix64 rng(seed);
  ChainState state(reference);
  std::vector<AppliedPerturbation> applied;
  std::vector<PerturbationRule> unused(rules.begin(), rules.end());
  std::vector<std::pair<int, PerturbedChain>> out;

  for (int level = 1; level <= max_level; ++level) {
    if (unused.empty()) unused.assign(rules.begin(), rules.end());
    std::vector<PerturbationRule> candidates = unused;
    shuffle(candidates, rng);
    bool advanced = false;
    for (const PerturbationRule rule : candidates) {
      bool applied_rule = false;
      for (int attempt = 0; attempt < kResampleCap && !applied_rule; ++attempt) {
        const std::uint64_t attempt_seed = rng.next();
        ChainState trial = state;
        try {
          AppliedPerturbation record =
              apply_to_state(trial, rule, attempt_seed, &pool, options);
          if (trial.steps == reference) continue;  // order rules may undo; redraw
          state = std::move(trial);
          applied.push_back(std::move(record));
          applied_rule = true;
        } catch (const Error& e) {
          if (e.code() != errc::rule_inapplicable) throw;
          break;
        }
      }
      if (applied_rule) {
        unused.erase(std::find(unused.begin(), unused.end(), rule));
        advanced = true;
        break;
      }
    }
    if (!advanced)
      fail(errc::rule_inapplicable,
           "no selected rule is applicable at level " + std::to_string(level));
    out.emplace_back(level, PerturbedChain{chain, state.steps, applied});
  }
  return out;
}

std::vector<std::string> replay(const std::vector<std::string>& reference_steps,
                                std::span<const AppliedPerturbation> applied,
                                const StepPool* pool, const PerturbOptions& options) {
  ChainState state(reference_steps);
  for (const AppliedPerturbation& record : applied)
    apply_to_state(state, record.rule, record.seed, pool, options);
  return state.steps;
}

}  // namespace reasonscore
