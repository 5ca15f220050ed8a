#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "reasonscore/error.hpp"
#include "reasonscore/providers.hpp"

namespace reasonscore {
namespace {

using nlohmann::json;

std::string granularity_name(Granularity g) {
  switch (g) {
    case Granularity::kStep: return "step";
    case Granularity::kToken: return "token";
    case Granularity::kChain: return "chain";
  }
  return "step";
}

// One POST with retry. A fresh client per request keeps concurrent callers
// independent; providers must be callable from multiple threads.
json post_json(const ProviderConfig& config, const std::string& path, const json& body) {
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (const char* token = std::getenv(config.auth_env.c_str()); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= config.retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    httplib::Client client(config.endpoint);
    client.set_connection_timeout(0, config.timeout_ms * 1000LL);
    client.set_read_timeout(0, config.timeout_ms * 1000LL);
    client.set_write_timeout(0, config.timeout_ms * 1000LL);
    client.set_default_headers(headers);
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      last_error = std::string("invalid JSON response: ") + e.what();
    }
  }
  fail(errc::remote, "remote call " + path + " failed after " +
                         std::to_string(config.retries + 1) + " attempts (" +
                         last_error + ")");
}

template <typename T>
std::vector<std::vector<T>> split_batches(std::span<const T> items, std::size_t max_batch) {
  std::vector<std::vector<T>> batches;
  for (std::size_t i = 0; i < items.size(); i += max_batch) {
    const std::size_t end = std::min(items.size(), i + max_batch);
    batches.emplace_back(items.begin() + i, items.begin() + end);
  }
  return batches;
}

UnitVector vector_from_json(const json& value, std::size_t expected_dim) {
  std::vector<double> v = value.get<std::vector<double>>();
  if (v.size() != expected_dim)
    fail(errc::dim_mismatch, "remote embedding dim " + std::to_string(v.size()) +
                                 " does not match configured dim " +
                                 std::to_string(expected_dim));
  return UnitVector::normalized(std::move(v));
}

}  // namespace

RemoteEmbeddingProvider::RemoteEmbeddingProvider(ProviderConfig config)
    : config_(std::move(config)) {
  validate(config_);
}

std::vector<UnitVector> RemoteEmbeddingProvider::embed(
    std::span<const std::string> texts, Granularity granularity) {
  if (granularity == Granularity::kToken)
    fail(errc::config, "use embed_tokens for token granularity");
  if (texts.empty()) fail(errc::empty_text, "embed requires at least one text");
  std::vector<UnitVector> out;
  out.reserve(texts.size());
  for (const auto& batch : split_batches(texts, config_.max_batch)) {
    const json body = {{"texts", batch}, {"granularity", granularity_name(granularity)}};
    const json reply = post_json(config_, "/embed", body);
    if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
        reply["vectors"].size() != batch.size())
      fail(errc::remote, "/embed returned a malformed vectors array");
    for (const json& v : reply["vectors"]) out.push_back(vector_from_json(v, config_.dim));
  }
  return out;
}

std::vector<std::vector<UnitVector>> RemoteEmbeddingProvider::embed_tokens(
    std::span<const std::string> texts) {
  if (texts.empty()) fail(errc::empty_text, "embed_tokens requires at least one text");
  std::vector<std::vector<UnitVector>> out;
  out.reserve(texts.size());
  for (const auto& batch : split_batches(texts, config_.max_batch)) {
    const json body = {{"texts", batch}, {"granularity", "token"}};
    const json reply = post_json(config_, "/embed", body);
    if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
        reply["vectors"].size() != batch.size())
      fail(errc::remote, "/embed returned a malformed vectors array");
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto canonical = tokenize(batch[i]);
      const json& group = reply["vectors"][i];
      if (!group.is_array() || group.size() != canonical.size())
        fail(errc::missing_tokens,
             "remote token vectors do not match the canonical tokenization");
      if (reply.contains("tokens")) {
        const auto server_tokens = reply["tokens"][i].get<std::vector<std::string>>();
        if (server_tokens != canonical)
          fail(errc::missing_tokens,
               "remote tokens do not match the canonical tokenization");
      }
      std::vector<UnitVector> vecs;
      vecs.reserve(group.size());
      for (const json& v : group) vecs.push_back(vector_from_json(v, config_.dim));
      out.push_back(std::move(vecs));
    }
  }
  return out;
}

RemoteNliProvider::RemoteNliProvider(ProviderConfig config) : config_(std::move(config)) {
  validate(config_);
}

std::vector<NliJudgment> RemoteNliProvider::judge(std::span<const NliPair> pairs) {
  std::vector<NliJudgment> out;
  out.reserve(pairs.size());
  for (const auto& batch : split_batches(pairs, config_.max_batch)) {
    json pair_list = json::array();
    for (const NliPair& p : batch) pair_list.push_back({p.premise, p.hypothesis});
    const json reply = post_json(config_, "/nli", json{{"pairs", pair_list}});
    if (!reply.contains("probs") || reply["probs"].size() != batch.size())
      fail(errc::remote, "/nli returned a malformed probs array");
    for (const json& probs : reply["probs"]) {
      if (!probs.is_array() || probs.size() != 3)
        fail(errc::remote, "/nli probabilities must be [e,n,c] triples");
      out.push_back(make_nli_judgment(probs[0].get<double>(), probs[1].get<double>(),
                                      probs[2].get<double>()));
    }
  }
  return out;
}

RemotePerplexityProvider::RemotePerplexityProvider(ProviderConfig config)
    : config_(std::move(config)) {
  validate(config_);
}

std::vector<double> RemotePerplexityProvider::perplexity(const std::vector<Step>& steps,
                                                         PerplexityMode mode) {
  if (steps.empty()) fail(errc::empty_chain, "perplexity of an empty chain");
  const bool chain = mode == PerplexityMode::kChainContext;
  const json body = {{"steps", step_texts(steps)}, {"mode", chain ? "chain" : "step"}};
  const json reply = post_json(config_, "/ppl", body);
  const std::size_t expected = chain ? 1 : steps.size();
  if (!reply.contains("ppl") || reply["ppl"].size() != expected)
    fail(errc::remote, "/ppl returned a malformed ppl array");
  std::vector<double> out = reply["ppl"].get<std::vector<double>>();
  for (double p : out) {
    if (!(p >= 1.0)) fail(errc::invalid_perplexity, "remote perplexity below 1");
  }
  return out;
}

RemoteGrammarProvider::RemoteGrammarProvider(ProviderConfig config)
    : config_(std::move(config)) {
  validate(config_);
}

std::vector<double> RemoteGrammarProvider::acceptability(
    std::span<const std::string> texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& batch : split_batches(texts, config_.max_batch)) {
    const json reply = post_json(config_, "/grammar", json{{"texts", batch}});
    if (!reply.contains("probs") || reply["probs"].size() != batch.size())
      fail(errc::remote, "/grammar returned a malformed probs array");
    for (const json& p : reply["probs"]) {
      const double prob = p.get<double>();
      if (prob < 0.0 || prob > 1.0)
        fail(errc::remote, "grammar probability outside [0,1]");
      out.push_back(prob);
    }
  }
  return out;
}

}  // namespace reasonscore
