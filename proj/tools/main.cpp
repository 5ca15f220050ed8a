#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reasonscore/commands.hpp"

namespace {

using reasonscore::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::string seed, metrics, rules, fraction, alpha, workers, output_format;
  std::vector<std::string> providers;  // name=kind
};

void add_common_options(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "flat JSON config file");
  cmd->add_option("--seed", flags.seed, "global RNG seed");
  cmd->add_option("--metrics", flags.metrics, "comma-separated metric list or 'all'");
  cmd->add_option("--rules", flags.rules, "comma-separated perturbation rules or 'all'");
  cmd->add_option("--fraction", flags.fraction, "fraction of chains to perturb");
  cmd->add_option("--alpha", flags.alpha, "significance level for aggregation");
  cmd->add_option("--workers", flags.workers, "concurrent scoring workers");
  cmd->add_option("--output-format", flags.output_format, "jsonl or csv");
  cmd->add_option("--provider", flags.providers,
                  "provider override, e.g. embedding=hash (repeatable)");
}

RunConfig build_config(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) config = reasonscore::load_config(flags.config_path);
  const auto apply = [&](const char* key, const std::string& value) {
    if (!value.empty()) reasonscore::apply_config_entry(config, key, value);
  };
  apply("seed", flags.seed);
  apply("metrics", flags.metrics);
  apply("rules", flags.rules);
  apply("fraction", flags.fraction);
  apply("alpha", flags.alpha);
  apply("workers", flags.workers);
  apply("output_format", flags.output_format);
  for (const std::string& override_pair : flags.providers) {
    const std::size_t eq = override_pair.find('=');
    if (eq == std::string::npos)
      reasonscore::fail(reasonscore::errc::config,
                        "--provider expects name=kind, got: " + override_pair);
    reasonscore::apply_config_entry(config, override_pair.substr(0, eq) + ".kind",
                                    override_pair.substr(eq + 1));
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reasonscore: score, perturb and meta-evaluate reasoning chains"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string input, output, labels, by = "perturbation", group_by = "metric";

  CLI::App* score = app.add_subcommand("score", "score chains with the selected metrics");
  score->add_option("--input", input, "chain JSONL file")->required();
  score->add_option("--output", output, "score report file")->required();
  add_common_options(score, flags);

  CLI::App* perturb = app.add_subcommand("perturb", "synthesize a diagnostics dataset");
  perturb->add_option("--input", input, "reference chain JSONL file")->required();
  perturb->add_option("--output", output, "diagnostics JSONL file")->required();
  add_common_options(perturb, flags);

  CLI::App* meta = app.add_subcommand("meta-eval", "correlate scores against labels");
  meta->add_option("--input", input, "score JSONL file")->required();
  meta->add_option("--labels", labels, "labeled chain JSONL file")->required();
  meta->add_option("--output", output, "correlation report file")->required();
  meta->add_option("--by", by, "group by 'perturbation' or 'error'");
  add_common_options(meta, flags);

  CLI::App* report = app.add_subcommand("report", "interquartile score summaries");
  report->add_option("--input", input, "score JSONL file")->required();
  report->add_option("--labels", labels, "labeled chain JSONL file (for group keys)");
  report->add_option("--output", output, "summary CSV file")->required();
  report->add_option("--group-by", group_by,
                     "comma list of metric,dataset,perturbed,perturbation");
  add_common_options(report, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = build_config(flags);
    if (score->parsed()) return reasonscore::cmd_score(config, input, output, std::cerr);
    if (perturb->parsed())
      return reasonscore::cmd_perturb(config, input, output, std::cerr);
    if (meta->parsed()) {
      reasonscore::MetaEvalArgs args;
      args.scores = input;
      args.labels = labels;
      args.output = output;
      args.group_by = by;
      if (!flags.output_format.empty()) args.format = flags.output_format;
      return reasonscore::cmd_meta_eval(config, args, std::cerr);
    }
    reasonscore::ReportArgs args;
    args.scores = input;
    if (!labels.empty()) args.labels = labels;
    args.output = output;
    args.group_by.clear();
    std::size_t start = 0;
    while (start <= group_by.size()) {
      std::size_t end = group_by.find(',', start);
      if (end == std::string::npos) end = group_by.size();
      if (end > start) args.group_by.push_back(group_by.substr(start, end - start));
      start = end + 1;
    }
    return reasonscore::cmd_report(config, args, std::cerr);
  } catch (const reasonscore::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return reasonscore::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
