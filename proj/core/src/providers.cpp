#include "reasonscore/providers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "reasonscore/error.hpp"
#include "reasonscore/rng.hpp"
#include "reasonscore/stats.hpp"

namespace reasonscore {
namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::fixture_miss, "cannot open fixture file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(errc::schema, "invalid JSON in fixture " + path + ": " + e.what());
  }
  return j;
}

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_negation_token(const Token& token) {
  const std::string t = lowercase_ascii(token);
  return t == "not" || t == "n't" || t == "never" || t == "no";
}

std::vector<Token> drop_negations(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) {
    if (!is_negation_token(t)) out.push_back(t);
  }
  return out;
}

UnitVector normalized_mean(std::span<const UnitVector> vectors, std::size_t dim) {
  if (vectors.empty()) fail(errc::empty_targets, "mean of zero vectors");
  std::vector<double> acc(dim, 0.0);
  for (const UnitVector& v : vectors) {
    if (v.dim() != dim) fail(errc::dim_mismatch, "mixed dims in vector mean");
    for (std::size_t i = 0; i < dim; ++i) acc[i] += v[i];
  }
  return UnitVector::normalized(std::move(acc));
}

NliJudgment judgment_from_json(const json& value) {
  if (value.is_number()) {
    const double c = value.get<double>();
    return make_nli_judgment(0.0, 1.0 - c, c);
  }
  if (value.is_array() && value.size() == 3) {
    return make_nli_judgment(value[0].get<double>(), value[1].get<double>(),
                             value[2].get<double>());
  }
  fail(errc::schema, "NLI fixture values must be a probability or an [e,n,c] triple");
}

}  // namespace

std::vector<UnitVector> EmbeddingBundle::flat_tokens() const {
  std::vector<UnitVector> flat;
  for (const auto& step : token_vectors)
    flat.insert(flat.end(), step.begin(), step.end());
  return flat;
}

void validate_bundle(const EmbeddingBundle& bundle, const std::vector<Step>& steps) {
  if (bundle.step_vectors.size() != steps.size())
    fail(errc::dim_mismatch, "bundle step count does not match steps");
  const auto check_unit = [&](const UnitVector& v) {
    if (v.dim() != bundle.dim) fail(errc::dim_mismatch, "bundle vector dim mismatch");
    double sq = 0.0;
    for (double x : v.values()) {
      if (!std::isfinite(x)) fail(errc::zero_vector, "non-finite vector in bundle");
      sq += x * x;
    }
    if (std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance)
      fail(errc::zero_vector, "non-unit vector in bundle");
  };
  for (const UnitVector& v : bundle.step_vectors) check_unit(v);
  check_unit(bundle.chain_vector);
  if (bundle.has_tokens()) {
    if (bundle.token_vectors.size() != steps.size())
      fail(errc::missing_tokens, "bundle token groups do not match steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (bundle.token_vectors[i].size() != steps[i].tokens().size())
        fail(errc::missing_tokens, "token vector count mismatch for step");
      for (const UnitVector& v : bundle.token_vectors[i]) check_unit(v);
    }
  }
}

NliJudgment make_nli_judgment(double p_entail, double p_neutral, double p_contradict) {
  const auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in01(p_entail) || !in01(p_neutral) || !in01(p_contradict))
    fail(errc::schema, "NLI probabilities must lie in [0,1]");
  if (std::abs(p_entail + p_neutral + p_contradict - 1.0) > 1e-6)
    fail(errc::schema, "NLI probabilities must sum to 1");
  return NliJudgment{p_entail, p_neutral, p_contradict};
}

void validate(const ProviderConfig& config) {
  if (config.max_batch < 1) fail(errc::config, "max_batch must be >= 1");
  if (config.retries < 0) fail(errc::config, "retries must be >= 0");
  if (config.dim < 1) fail(errc::config, "embedding dim must be >= 1");
}

double NliProvider::contradiction(const std::string& premise,
                                  const std::string& hypothesis) {
  const NliPair pair{premise, hypothesis};
  return judge(std::span<const NliPair>(&pair, 1)).at(0).p_contradict;
}

// --- HashEmbeddingProvider ---------------------------------------------------

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim_ < 1) fail(errc::config, "embedding dim must be >= 1");
}

UnitVector HashEmbeddingProvider::token_vector(const std::string& token) const {
  SplitMix64 stream(fnv1a64(token) ^ seed_);
  std::vector<double> components(dim_);
  for (double& c : components) c = 2.0 * stream.next_double() - 1.0;
  return UnitVector::normalized(std::move(components));
}

std::vector<UnitVector> HashEmbeddingProvider::embed(
    std::span<const std::string> texts, Granularity granularity) {
  if (granularity == Granularity::kToken)
    fail(errc::config, "use embed_tokens for token granularity");
  if (texts.empty()) fail(errc::empty_text, "embed requires at least one text");
  std::vector<UnitVector> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    const auto tokens = tokenize(text);
    std::vector<UnitVector> vecs;
    vecs.reserve(tokens.size());
    for (const Token& t : tokens) vecs.push_back(token_vector(t));
    out.push_back(normalized_mean(vecs, dim_));
  }
  return out;
}

std::vector<std::vector<UnitVector>> HashEmbeddingProvider::embed_tokens(
    std::span<const std::string> texts) {
  if (texts.empty()) fail(errc::empty_text, "embed_tokens requires at least one text");
  std::vector<std::vector<UnitVector>> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    const auto tokens = tokenize(text);
    std::vector<UnitVector> vecs;
    vecs.reserve(tokens.size());
    for (const Token& t : tokens) vecs.push_back(token_vector(t));
    out.push_back(std::move(vecs));
  }
  return out;
}

// --- FixtureEmbeddingProvider ------------------------------------------------

FixtureEmbeddingProvider::FixtureEmbeddingProvider(const std::string& fixture_path) {
  const json j = load_json_file(fixture_path);
  if (!j.is_object() || j.empty())
    fail(errc::schema, "embedding fixture must be a non-empty object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_array()) fail(errc::schema, "embedding fixture values must be arrays");
    std::vector<double> v = value.get<std::vector<double>>();
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) fail(errc::dim_mismatch, "embedding fixture has mixed dims");
    table_.emplace(key, UnitVector::normalized(std::move(v)));
  }
}

UnitVector FixtureEmbeddingProvider::lookup(const std::string& text) const {
  const auto it = table_.find(text);
  if (it == table_.end())
    fail(errc::fixture_miss, "embedding fixture has no entry for: " + text);
  return it->second;
}

std::vector<UnitVector> FixtureEmbeddingProvider::embed(
    std::span<const std::string> texts, Granularity granularity) {
  if (granularity == Granularity::kToken)
    fail(errc::config, "use embed_tokens for token granularity");
  std::vector<UnitVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(lookup(t));
  return out;
}

std::vector<std::vector<UnitVector>> FixtureEmbeddingProvider::embed_tokens(
    std::span<const std::string> texts) {
  std::vector<std::vector<UnitVector>> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    std::vector<UnitVector> vecs;
    for (const Token& tok : tokenize(text)) vecs.push_back(lookup(tok));
    out.push_back(std::move(vecs));
  }
  return out;
}

// --- HeuristicNliProvider ----------------------------------------------------

std::vector<NliJudgment> HeuristicNliProvider::judge(std::span<const NliPair> pairs) {
  std::vector<NliJudgment> out;
  out.reserve(pairs.size());
  for (const NliPair& pair : pairs) {
    if (pair.premise.empty() || pair.hypothesis.empty())
      fail(errc::empty_text, "NLI requires non-empty texts");
    bool contra = false;
    if (pair.premise != pair.hypothesis) {
      const auto a = drop_negations(tokenize(pair.premise));
      const auto b = drop_negations(tokenize(pair.hypothesis));
      contra = !a.empty() && a == b;
    }
    out.push_back(contra ? make_nli_judgment(0.0, 0.0, 1.0)
                         : make_nli_judgment(0.0, 1.0, 0.0));
  }
  return out;
}

// --- FixtureNliProvider ------------------------------------------------------

FixtureNliProvider::FixtureNliProvider(const std::string& fixture_path) {
  const json j = load_json_file(fixture_path);
  if (!j.is_object()) fail(errc::schema, "NLI fixture must be an object");
  for (const auto& [premise, inner] : j.items()) {
    if (!inner.is_object())
      fail(errc::schema, "NLI fixture must map premise -> hypothesis -> probs");
    for (const auto& [hypothesis, value] : inner.items())
      table_[premise][hypothesis] = judgment_from_json(value);
  }
}

std::vector<NliJudgment> FixtureNliProvider::judge(std::span<const NliPair> pairs) {
  std::vector<NliJudgment> out;
  out.reserve(pairs.size());
  for (const NliPair& pair : pairs) {
    const auto it = table_.find(pair.premise);
    if (it != table_.end()) {
      const auto jt = it->second.find(pair.hypothesis);
      if (jt != it->second.end()) {
        out.push_back(jt->second);
        continue;
      }
    }
    out.push_back(make_nli_judgment(0.0, 1.0, 0.0));  // unknown pair: p_contr 0
  }
  return out;
}

// --- HashPerplexityProvider --------------------------------------------------

double HashPerplexityProvider::unit_ppl(std::span<const Token> tokens) const {
  static const double kMaxSurprisal = std::log(100.0);
  std::vector<double> surprisals;
  surprisals.reserve(tokens.size());
  for (const Token& t : tokens) {
    SplitMix64 stream(fnv1a64(t) ^ (seed_ * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull));
    surprisals.push_back(stream.next_double() * kMaxSurprisal);
  }
  return std::exp(stable_mean(surprisals));
}

std::vector<double> HashPerplexityProvider::perplexity(const std::vector<Step>& steps,
                                                       PerplexityMode mode) {
  if (steps.empty()) fail(errc::empty_chain, "perplexity of an empty chain");
  if (mode == PerplexityMode::kChainContext) {
    std::vector<Token> all;
    for (const Step& s : steps)
      all.insert(all.end(), s.tokens().begin(), s.tokens().end());
    return {unit_ppl(all)};
  }
  std::vector<double> out;
  out.reserve(steps.size());
  for (const Step& s : steps) out.push_back(unit_ppl(s.tokens()));
  return out;
}

// --- FixturePerplexityProvider -----------------------------------------------

FixturePerplexityProvider::FixturePerplexityProvider(const std::string& fixture_path) {
  const json j = load_json_file(fixture_path);
  if (!j.is_object()) fail(errc::schema, "perplexity fixture must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "default") {
      default_ = value.get<double>();
      continue;
    }
    table_[key] = value.get<double>();
  }
}

double FixturePerplexityProvider::lookup(const std::string& text) const {
  const auto it = table_.find(text);
  double ppl = 0.0;
  if (it != table_.end()) {
    ppl = it->second;
  } else if (default_) {
    ppl = *default_;
  } else {
    fail(errc::fixture_miss, "perplexity fixture has no entry for: " + text);
  }
  if (ppl < 1.0) fail(errc::invalid_perplexity, "fixture perplexity below 1");
  return ppl;
}

std::vector<double> FixturePerplexityProvider::perplexity(const std::vector<Step>& steps,
                                                          PerplexityMode mode) {
  if (steps.empty()) fail(errc::empty_chain, "perplexity of an empty chain");
  if (mode == PerplexityMode::kChainContext) return {lookup(join_chain(steps))};
  std::vector<double> out;
  out.reserve(steps.size());
  for (const Step& s : steps) out.push_back(lookup(s.text()));
  return out;
}

// --- Grammar providers -------------------------------------------------------

std::vector<double> HashGrammarProvider::acceptability(
    std::span<const std::string> texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    if (t.empty()) fail(errc::empty_text, "grammar probability of empty text");
    SplitMix64 stream(fnv1a64(t) ^ (seed_ + 0x6A09E667F3BCC909ull));
    out.push_back(stream.next_double());
  }
  return out;
}

FixtureGrammarProvider::FixtureGrammarProvider(const std::string& fixture_path) {
  const json j = load_json_file(fixture_path);
  if (!j.is_object()) fail(errc::schema, "grammar fixture must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "default") {
      default_ = value.get<double>();
      continue;
    }
    table_[key] = value.get<double>();
  }
}

std::vector<double> FixtureGrammarProvider::acceptability(
    std::span<const std::string> texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    const auto it = table_.find(t);
    const double p = it != table_.end() ? it->second : default_;
    if (p < 0.0 || p > 1.0)
      fail(errc::schema, "grammar probability outside [0,1] in fixture");
    out.push_back(p);
  }
  return out;
}

// --- Factories ---------------------------------------------------------------

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const std::string& kind,
                                                           const ProviderConfig& config) {
  validate(config);
  if (kind == "hash") return std::make_unique<HashEmbeddingProvider>(config.dim, config.seed);
  if (kind == "fixture") return std::make_unique<FixtureEmbeddingProvider>(config.fixture_path);
  if (kind == "remote") return std::make_unique<RemoteEmbeddingProvider>(config);
  fail(errc::config, "unknown embedding provider kind: " + kind);
}

std::unique_ptr<NliProvider> make_nli_provider(const std::string& kind,
                                               const ProviderConfig& config) {
  validate(config);
  if (kind == "hash" || kind == "heuristic") return std::make_unique<HeuristicNliProvider>();
  if (kind == "fixture") return std::make_unique<FixtureNliProvider>(config.fixture_path);
  if (kind == "remote") return std::make_unique<RemoteNliProvider>(config);
  fail(errc::config, "unknown NLI provider kind: " + kind);
}

std::unique_ptr<PerplexityProvider> make_perplexity_provider(const std::string& kind,
                                                             const ProviderConfig& config) {
  validate(config);
  if (kind == "hash") return std::make_unique<HashPerplexityProvider>(config.seed);
  if (kind == "fixture") return std::make_unique<FixturePerplexityProvider>(config.fixture_path);
  if (kind == "remote") return std::make_unique<RemotePerplexityProvider>(config);
  fail(errc::config, "unknown perplexity provider kind: " + kind);
}

std::unique_ptr<GrammarProvider> make_grammar_provider(const std::string& kind,
                                                       const ProviderConfig& config) {
  validate(config);
  if (kind == "hash") return std::make_unique<HashGrammarProvider>(config.seed);
  if (kind == "fixture") return std::make_unique<FixtureGrammarProvider>(config.fixture_path);
  if (kind == "remote") return std::make_unique<RemoteGrammarProvider>(config);
  fail(errc::config, "unknown grammar provider kind: " + kind);
}

EmbeddingBundle make_bundle(const std::vector<Step>& steps,
                            EmbeddingProvider& provider, bool with_tokens) {
  if (steps.empty()) fail(errc::empty_chain, "cannot embed an empty step list");
  const std::vector<std::string> texts = step_texts(steps);
  const std::string joined = join_chain(steps);
  EmbeddingBundle bundle{
      provider.embed(texts, Granularity::kStep),
      {},
      provider.embed(std::span<const std::string>(&joined, 1), Granularity::kChain).at(0),
      provider.dim()};
  if (with_tokens) bundle.token_vectors = provider.embed_tokens(texts);
  validate_bundle(bundle, steps);
  return bundle;
}

}  // namespace reasonscore
