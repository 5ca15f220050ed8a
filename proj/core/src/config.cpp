#include "reasonscore/config.hpp"

#include <fstream>

#include "json.hpp"
#include "reasonscore/error.hpp"

namespace reasonscore {
namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find(',', start);
    if (end == std::string::npos) end = csv.size();
    std::string item = csv.substr(start, end - start);
    const std::size_t a = item.find_first_not_of(" \t");
    const std::size_t b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    start = end + 1;
  }
  return out;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    fail(errc::config, "invalid integer for '" + key + "': " + value);
  }
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    fail(errc::config, "invalid number for '" + key + "': " + value);
  }
}

bool apply_provider_entry(ProviderChoice& choice, const std::string& field,
                          const std::string& value, const std::string& key) {
  if (field == "kind") {
    choice.kind = value;
  } else if (field == "endpoint") {
    choice.config.endpoint = value;
  } else if (field == "fixture") {
    choice.config.fixture_path = value;
  } else if (field == "dim") {
    choice.config.dim = static_cast<std::size_t>(parse_u64(value, key));
  } else if (field == "max_batch") {
    choice.config.max_batch = static_cast<std::size_t>(parse_u64(value, key));
  } else if (field == "timeout_ms") {
    choice.config.timeout_ms = static_cast<int>(parse_u64(value, key));
  } else if (field == "retries") {
    choice.config.retries = static_cast<int>(parse_u64(value, key));
  } else if (field == "auth_env") {
    choice.config.auth_env = value;
  } else {
    return false;
  }
  return true;
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(errc::config, "alpha must lie in (0,1)");
  if (!(fraction > 0.0 && fraction < 1.0))
    fail(errc::config, "fraction must lie in (0,1)");
  if (workers < 1) fail(errc::config, "workers must be >= 1");
  if (permutations < 0) fail(errc::config, "permutations must be >= 0");
  if (output_format != "jsonl" && output_format != "csv")
    fail(errc::config, "output_format must be jsonl or csv");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::config, "cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(errc::config, "invalid JSON config: " + std::string(e.what()));
  }
  if (!j.is_object()) fail(errc::config, "config must be a flat JSON object");
  RunConfig config;
  for (const auto& [key, value] : j.items()) {
    const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    apply_config_entry(config, key, text);
  }
  config.validate();
  return config;
}

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "seed") {
    config.seed = parse_u64(value, key);
  } else if (key == "alpha") {
    config.alpha = parse_double(value, key);
  } else if (key == "fraction") {
    config.fraction = parse_double(value, key);
  } else if (key == "workers") {
    config.workers = static_cast<int>(parse_u64(value, key));
  } else if (key == "permutations") {
    config.permutations = static_cast<int>(parse_u64(value, key));
  } else if (key == "output_format") {
    config.output_format = value;
  } else if (key == "metrics") {
    config.metrics = parse_metric_list(value);
  } else if (key == "rules") {
    config.rules = parse_rule_list(value);
  } else if (key == "nli_orientation") {
    const auto o = nli_orientation_from_string(value);
    if (!o) fail(errc::config, "unknown nli_orientation: " + value);
    config.nli_orientation = *o;
  } else if (key == "auth_env") {
    config.embedding.config.auth_env = value;
    config.nli.config.auth_env = value;
    config.ppl.config.auth_env = value;
    config.grammar.config.auth_env = value;
  } else {
    const std::size_t dot = key.find('.');
    if (dot != std::string::npos) {
      const std::string provider = key.substr(0, dot);
      const std::string field = key.substr(dot + 1);
      ProviderChoice* choice = provider == "embedding" ? &config.embedding
                               : provider == "nli"     ? &config.nli
                               : provider == "ppl"     ? &config.ppl
                               : provider == "grammar" ? &config.grammar
                                                       : nullptr;
      if (choice != nullptr && apply_provider_entry(*choice, field, value, key)) return;
    }
    fail(errc::config, "unknown config key: " + key);
  }
}

std::vector<MetricId> parse_metric_list(const std::string& csv) {
  if (csv.empty() || csv == "all") return {};
  std::vector<MetricId> out;
  for (const std::string& name : split_csv(csv)) {
    const auto id = metric_from_string(name);
    if (!id) fail(errc::config, "unknown metric: " + name);
    out.push_back(*id);
  }
  return out;
}

std::vector<PerturbationRule> parse_rule_list(const std::string& csv) {
  if (csv.empty() || csv == "all") return {};
  std::vector<PerturbationRule> out;
  for (const std::string& name : split_csv(csv)) {
    const auto rule = rule_from_string(name);
    if (!rule) fail(errc::config, "unknown perturbation rule: " + name);
    out.push_back(*rule);
  }
  return out;
}

ProviderSet make_providers(const RunConfig& config) {
  const auto configured = [&](const ProviderChoice& choice) {
    ProviderConfig c = choice.config;
    c.seed = config.seed;
    return c;
  };
  ProviderSet set;
  set.embedding = make_embedding_provider(config.embedding.kind, configured(config.embedding));
  set.nli = make_nli_provider(config.nli.kind, configured(config.nli));
  set.perplexity = make_perplexity_provider(config.ppl.kind, configured(config.ppl));
  set.grammar = make_grammar_provider(config.grammar.kind, configured(config.grammar));
  return set;
}

}  // namespace reasonscore
