#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reasonscore/metric.hpp"
#include "reasonscore/metrics_inference.hpp"
#include "reasonscore/perturb.hpp"
#include "reasonscore/providers.hpp"

namespace reasonscore {

struct ProviderChoice {
  std::string kind = "hash";  // remote | hash | fixture
  ProviderConfig config;
};

/// Full run configuration. Loadable from a flat JSON key/value document;
/// every key can also be overridden from the command line, so a single
/// config file pins a reproducible run.
struct RunConfig {
  std::uint64_t seed = 0;
  double alpha = 0.05;
  double fraction = 0.5;
  int workers = 4;
  int permutations = 10000;
  std::string output_format = "jsonl";  // jsonl | csv
  std::vector<MetricId> metrics;        // empty = all 18
  std::vector<PerturbationRule> rules;  // empty = all 12
  NliOrientation nli_orientation = NliOrientation::kEarlierPremise;
  ProviderChoice embedding, nli, ppl, grammar;

  void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);

/// Applies one "key=value" style entry (config-file keys and CLI overrides
/// share this path). Throws errc::config for unknown keys or bad values.
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

/// "all" (or "") selects everything; otherwise a comma-separated name list.
std::vector<MetricId> parse_metric_list(const std::string& csv);
std::vector<PerturbationRule> parse_rule_list(const std::string& csv);

ProviderSet make_providers(const RunConfig& config);

}  // namespace reasonscore
