#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reasonscore/config.hpp"
#include "reasonscore/error.hpp"

namespace reasonscore {

/// Exit-code contract: 0 ok, 2 schema/config error, 3 perturbation
/// infeasible, 4 join failure, 5 provider failure.
int exit_code(const Error& error);

/// Scores every chain in `input` (JSONL) and writes one report per line to
/// `output`, input order preserved. Provider failures stop the run with the
/// partial-output path reported on `diag`.
int cmd_score(const RunConfig& config, const std::filesystem::path& input,
              const std::filesystem::path& output, std::ostream& diag);

/// Builds a diagnostics dataset from reference chains and writes it as
/// JSONL; per-rule counts go to `diag`.
int cmd_perturb(const RunConfig& config, const std::filesystem::path& input,
                const std::filesystem::path& output, std::ostream& diag);

struct MetaEvalArgs {
  std::filesystem::path scores;
  std::filesystem::path labels;
  std::filesystem::path output;
  std::string group_by = "perturbation";  // perturbation | error
  std::string format = "csv";             // csv | jsonl
};

/// Somers' D of every metric against every perturbation (or error type),
/// plus significance-filtered per-metric and per-family aggregates.
int cmd_meta_eval(const RunConfig& config, const MetaEvalArgs& args, std::ostream& diag);

struct ReportArgs {
  std::filesystem::path scores;
  std::optional<std::filesystem::path> labels;
  std::filesystem::path output;
  std::vector<std::string> group_by = {"metric"};  // of metric,dataset,perturbed,perturbation
};

/// Interquartile summaries (min/Q1/median/Q3/max) per group, as CSV.
int cmd_report(const RunConfig& config, const ReportArgs& args, std::ostream& diag);

}  // namespace reasonscore
