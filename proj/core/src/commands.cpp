#include "reasonscore/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "json.hpp"
#include "reasonscore/jsonl.hpp"
#include "reasonscore/meta_eval.hpp"
#include "reasonscore/perturb.hpp"
#include "reasonscore/rng.hpp"
#include "reasonscore/scorer.hpp"
#include "reasonscore/stats.hpp"

namespace reasonscore {
namespace {

using nlohmann::json;

std::string fmt6(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", v);
  return buffer;
}

template <typename Fn>
int run_guarded(std::ostream& diag, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const Error& e) {
    diag << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int exit_code(const Error& error) {
  switch (error.code()) {
    case errc::rule_inapplicable:
    case errc::perturbation_infeasible:
      return 3;
    case errc::join_failure:
      return 4;
    case errc::remote:
    case errc::fixture_miss:
    case errc::zero_vector:
    case errc::dim_mismatch:
    case errc::missing_tokens:
    case errc::invalid_perplexity:
      return 5;
    default:
      return 2;
  }
}

int cmd_score(const RunConfig& config, const std::filesystem::path& input,
              const std::filesystem::path& output, std::ostream& diag) {
  return run_guarded(diag, [&] {
    config.validate();
    const auto chains = read_chains(input);

    if (!config.metrics.empty()) {
      const bool wants_reference = std::any_of(config.metrics.begin(), config.metrics.end(),
                                               [](MetricId id) { return requires_reference(id); });
      const bool any_reference = std::any_of(chains.begin(), chains.end(),
                                             [](const ReasoningChain& c) { return c.has_reference(); });
      if (wants_reference && !any_reference)
        fail(errc::schema,
             "reference-based metrics selected but no chain in the input has a reference");
    }

    ChainScorer scorer(make_providers(config), {config.metrics, config.nli_orientation});
    const std::vector<MetricId>& metric_list = scorer.metrics();

    const std::size_t n = chains.size();
    std::vector<std::optional<ScoreReport>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const std::size_t worker_count =
        std::min<std::size_t>(static_cast<std::size_t>(config.workers), n);
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            results[i] = scorer.score(chains[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();

    std::ofstream out(output, std::ios::binary);
    if (!out) fail(errc::schema, "cannot open output file: " + output.string());
    const bool csv = config.output_format == "csv";
    if (csv) out << score_csv_header(metric_list) << '\n';
    std::size_t written = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (errors[i]) {
        out.flush();
        diag << "scoring failed on chain '" << chains[i].id() << "'; partial output ("
             << written << " of " << n << " chains) written to " << output.string()
             << '\n';
        std::rethrow_exception(errors[i]);
      }
      out << (csv ? report_to_csv_row(*results[i], metric_list)
                  : report_to_json_line(*results[i], metric_list))
          << '\n';
      ++written;
    }
  });
}

int cmd_perturb(const RunConfig& config, const std::filesystem::path& input,
                const std::filesystem::path& output, std::ostream& diag) {
  return run_guarded(diag, [&] {
    config.validate();
    const auto chains = read_chains(input, {.hypothesis_defaults_to_reference = true});
    const std::vector<PerturbationRule> rules =
        config.rules.empty() ? std::vector<PerturbationRule>(kAllRules.begin(), kAllRules.end())
                             : config.rules;
    const auto diagnostics = build_diagnostics(chains, rules, config.fraction, config.seed);

    std::vector<ReasoningChain> out_chains;
    out_chains.reserve(diagnostics.size());
    std::map<std::string, std::size_t> rule_counts;
    std::size_t perturbed = 0;
    for (const PerturbedChain& pc : diagnostics) {
      out_chains.push_back(pc.to_chain());
      if (pc.perturbed()) ++perturbed;
      for (const AppliedPerturbation& a : pc.applied)
        ++rule_counts[std::string(to_string(a.rule))];
    }
    write_chains(output, out_chains);

    diag << "perturbed " << perturbed << " of " << diagnostics.size() << " chains\n";
    for (const auto& [rule, count] : rule_counts)
      diag << "  " << rule << ": " << count << '\n';
  });
}

namespace {

struct LabeledScores {
  std::vector<ScoreRow> rows;                      // joined rows only
  std::vector<const ReasoningChain*> chains;       // parallel to rows
};

LabeledScores join_scores_with_labels(const std::vector<ScoreRow>& scores,
                                      const std::vector<ReasoningChain>& labels) {
  std::map<std::string, const ReasoningChain*> by_id;
  for (const ReasoningChain& chain : labels) by_id[chain.id()] = &chain;
  LabeledScores joined;
  for (const ScoreRow& row : scores) {
    const auto it = by_id.find(row.chain_id);
    if (it == by_id.end()) continue;
    joined.rows.push_back(row);
    joined.chains.push_back(it->second);
  }
  if (joined.rows.empty())
    fail(errc::join_failure, "no chain ids shared between scores and labels");
  return joined;
}

std::vector<std::string> chain_groups(const ReasoningChain& chain,
                                      const std::string& group_by) {
  std::vector<std::string> groups;
  if (group_by == "perturbation") {
    groups = chain.perturbations();
  } else if (group_by == "error") {
    if (chain.labels()) {
      for (const auto& [type, present] : *chain.labels()) {
        if (present) groups.emplace_back(to_string(type));
      }
    }
  } else {
    fail(errc::config, "group_by must be 'perturbation' or 'error'");
  }
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  return groups;
}

}  // namespace

int cmd_meta_eval(const RunConfig& config, const MetaEvalArgs& args, std::ostream& diag) {
  return run_guarded(diag, [&] {
    config.validate();
    const auto scores = read_scores(args.scores);
    const auto labels = read_chains(args.labels);
    const LabeledScores joined = join_scores_with_labels(scores, labels);

    std::set<std::string> metric_names;
    for (const ScoreRow& row : joined.rows) {
      for (const auto& [name, value] : row.scores) metric_names.insert(name);
    }

    struct Cell {
      std::string metric, group;
      CorrelationResult result;
    };
    std::vector<Cell> cells;
    std::map<std::string, std::map<std::string, CorrelationResult>> per_metric;

    for (const std::string& metric : metric_names) {
      std::set<std::string> groups;
      for (const ReasoningChain* chain : joined.chains) {
        for (const std::string& g : chain_groups(*chain, args.group_by)) groups.insert(g);
      }
      for (const std::string& group : groups) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < joined.rows.size(); ++i) {
          const auto it = joined.rows[i].scores.find(metric);
          if (it == joined.rows[i].scores.end() || !it->second) continue;
          const ReasoningChain& chain = *joined.chains[i];
          const bool clean = chain.perturbations().empty();
          const auto chain_tags = chain_groups(chain, args.group_by);
          const bool in_group =
              std::find(chain_tags.begin(), chain_tags.end(), group) != chain_tags.end();
          if (clean) {
            x.push_back(1.0);  // label 1 = unperturbed
            y.push_back(*it->second);
          } else if (in_group) {
            x.push_back(0.0);
            y.push_back(*it->second);
          }
        }
        std::set<double> distinct(x.begin(), x.end());
        if (x.size() < 2 || distinct.size() < 2) continue;
        SomersOptions options;
        options.permutations = config.permutations;
        options.seed = derive_seed(config.seed, metric + "|" + group);
        const CorrelationResult result = somers_d(x, y, options);
        cells.push_back({metric, group, result});
        per_metric[metric][group] = result;
      }
    }
    if (cells.empty())
      fail(errc::join_failure, "no (metric, group) pair had both clean and labeled chains");

    // family aggregates pool every significant cell of the family's metrics
    std::map<std::string, std::map<std::string, CorrelationResult>> per_family;
    for (const Cell& cell : cells) {
      if (const auto id = metric_from_string(cell.metric))
        per_family[std::string(to_string(family(*id)))][cell.metric + "|" + cell.group] =
            cell.result;
    }

    std::ofstream out(args.output, std::ios::binary);
    if (!out) fail(errc::schema, "cannot open output file: " + args.output.string());
    const bool jsonl = args.format == "jsonl";
    if (!jsonl)
      out << "kind,family,metric," << args.group_by << ",d,p,n,n_clean,n_perturbed\n";
    const auto family_name = [](const std::string& metric) -> std::string {
      const auto id = metric_from_string(metric);
      return id ? std::string(to_string(family(*id))) : std::string();
    };
    for (const Cell& cell : cells) {
      if (jsonl) {
        out << json{{"kind", "cell"},
                    {"family", family_name(cell.metric)},
                    {"metric", cell.metric},
                    {"group", cell.group},
                    {"d", cell.result.d},
                    {"p", cell.result.p_value},
                    {"n", cell.result.n},
                    {"n_clean", cell.result.n_pos},
                    {"n_perturbed", cell.result.n_neg}}
                   .dump()
            << '\n';
      } else {
        out << "cell," << family_name(cell.metric) << ',' << cell.metric << ','
            << cell.group << ',' << fmt6(cell.result.d) << ',' << fmt6(cell.result.p_value)
            << ',' << cell.result.n << ',' << cell.result.n_pos << ','
            << cell.result.n_neg << '\n';
      }
    }
    for (const auto& [metric, results] : per_metric) {
      const auto best = aggregate_max(results, config.alpha);
      if (jsonl) {
        out << json{{"kind", "metric_aggregate"},
                    {"family", family_name(metric)},
                    {"metric", metric},
                    {"d", best ? json(*best) : json(nullptr)}}
                   .dump()
            << '\n';
      } else {
        out << "metric_aggregate," << family_name(metric) << ',' << metric << ",,"
            << (best ? fmt6(*best) : "-") << ",,,,\n";
      }
    }
    for (const auto& [fam, results] : per_family) {
      const auto best = aggregate_max(results, config.alpha);
      if (jsonl) {
        out << json{{"kind", "family_aggregate"},
                    {"family", fam},
                    {"d", best ? json(*best) : json(nullptr)}}
                   .dump()
            << '\n';
      } else {
        out << "family_aggregate," << fam << ",,," << (best ? fmt6(*best) : "-")
            << ",,,,\n";
      }
    }
  });
}

int cmd_report(const RunConfig& config, const ReportArgs& args, std::ostream& diag) {
  return run_guarded(diag, [&] {
    config.validate();
    const auto scores = read_scores(args.scores);

    for (const std::string& key : args.group_by) {
      if (key != "metric" && key != "dataset" && key != "perturbed" &&
          key != "perturbation")
        fail(errc::config, "unknown group-by key: " + key);
    }
    const auto grouped_by = [&](const std::string& key) {
      return std::find(args.group_by.begin(), args.group_by.end(), key) !=
             args.group_by.end();
    };
    const bool needs_labels =
        grouped_by("dataset") || grouped_by("perturbed") || grouped_by("perturbation");
    std::map<std::string, const ReasoningChain*> by_id;
    std::vector<ReasoningChain> labels;
    if (needs_labels) {
      if (!args.labels)
        fail(errc::config, "--labels is required for dataset/perturbed/perturbation groups");
      labels = read_chains(*args.labels);
      for (const ReasoningChain& chain : labels) by_id[chain.id()] = &chain;
    }

    std::map<std::vector<std::string>, std::vector<double>> groups;
    for (const ScoreRow& row : scores) {
      const ReasoningChain* chain = nullptr;
      if (needs_labels) {
        const auto it = by_id.find(row.chain_id);
        if (it == by_id.end()) continue;
        chain = it->second;
      }
      for (const auto& [metric, value] : row.scores) {
        if (!value) continue;
        std::vector<std::string> key;
        key.push_back(metric);
        if (grouped_by("dataset")) key.push_back(extra_string_field(*chain, "dataset"));
        if (grouped_by("perturbed"))
          key.push_back(chain->perturbations().empty() ? "original" : "perturbed");
        if (grouped_by("perturbation")) key.push_back(join_chain(
            chain->perturbations().empty() ? std::vector<std::string>{"none"}
                                           : chain->perturbations()));
        groups[std::move(key)].push_back(*value);
      }
    }
    if (groups.empty()) fail(errc::empty_group, "no scored groups to summarize");

    std::ofstream out(args.output, std::ios::binary);
    if (!out) fail(errc::schema, "cannot open output file: " + args.output.string());
    out << "metric";
    if (grouped_by("dataset")) out << ",dataset";
    if (grouped_by("perturbed")) out << ",perturbed";
    if (grouped_by("perturbation")) out << ",perturbation";
    out << ",count,min,q1,median,q3,max\n";
    for (const auto& [key, values] : groups) {
      const FiveNumberSummary s = summarize(values);
      for (std::size_t i = 0; i < key.size(); ++i) out << (i ? "," : "") << key[i];
      out << ',' << s.count << ',' << fmt6(s.min) << ',' << fmt6(s.q1) << ','
          << fmt6(s.median) << ',' << fmt6(s.q3) << ',' << fmt6(s.max) << '\n';
    }
  });
}

}  // namespace reasonscore
