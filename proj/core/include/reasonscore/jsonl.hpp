#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reasonscore/chain.hpp"

namespace reasonscore {

struct ChainReadOptions {
  /// Accept chains without a "hypothesis" field by copying the reference,
  /// as diagnostics inputs are reference-only.
  bool hypothesis_defaults_to_reference = false;
};

/// One chain per line:
/// {"id": str, "source": [str,...], "hypothesis": [str,...],
///  "reference": [str,...]?, "labels": {"grammar": bool, ...}?,
///  "perturbations": [str,...]?}
/// Unknown fields are preserved on round-trip.
ReasoningChain chain_from_json_line(const std::string& line,
                                    const ChainReadOptions& options = {});
std::string chain_to_json_line(const ReasoningChain& chain);

/// Schema errors carry the 1-based line number in their message.
std::vector<ReasoningChain> read_chains(const std::filesystem::path& path,
                                        const ChainReadOptions& options = {});
void write_chains(const std::filesystem::path& path,
                  std::span<const ReasoningChain> chains);

/// Score line: {"id": str, "scores": {metric: value|null, ...},
/// "orientation": {metric: "higher_is_better"|...},
/// "not_applicable": [metric,...]}. `selected` controls which metrics are
/// emitted (null when unavailable).
std::string report_to_json_line(const ScoreReport& report,
                                std::span<const MetricId> selected);

std::string score_csv_header(std::span<const MetricId> selected);
std::string report_to_csv_row(const ScoreReport& report,
                              std::span<const MetricId> selected);

/// Parsed score line from any scorer: metric name -> value (nullopt when
/// null or missing).
struct ScoreRow {
  std::string chain_id;
  std::map<std::string, std::optional<double>> scores;
};

std::vector<ScoreRow> read_scores(const std::filesystem::path& path);

/// Looks up a string field preserved in the chain's extra JSON ("" when
/// absent).
std::string extra_string_field(const ReasoningChain& chain, const std::string& key);

}  // namespace reasonscore
