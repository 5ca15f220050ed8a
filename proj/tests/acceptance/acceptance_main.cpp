// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Usage: reasonscore_acceptance [path-to-cli-binary]
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "reasonscore/commands.hpp"
#include "reasonscore/jsonl.hpp"
#include "reasonscore/meta_eval.hpp"
#include "reasonscore/metrics_semantic.hpp"
#include "reasonscore/scorer.hpp"

#include "../support/oracles.hpp"
#include "../support/testutil.hpp"

using namespace reasonscore;
using nlohmann::json;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string description)
      : number_(number), description_(std::move(description)),
        start_(std::chrono::steady_clock::now()) {}

  void check(bool condition, const std::string& detail) {
    if (!condition) {
      ok_ = false;
      details_.push_back(detail);
    }
  }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

  void finish(double budget_seconds = 0.0) {
    const double elapsed = seconds();
    if (budget_seconds > 0.0 && elapsed > budget_seconds) {
      ok_ = false;
      details_.push_back("runtime " + std::to_string(elapsed) + "s exceeds budget " +
                         std::to_string(budget_seconds) + "s");
    }
    std::ostringstream line;
    line << (ok_ ? "PASS" : "FAIL") << " criterion " << number_ << ": " << description_
         << " (" << std::fixed << elapsed << "s)";
    std::cout << line.str() << '\n';
    for (const std::string& d : details_) std::cout << "       - " << d << '\n';
    if (!ok_) ++g_failures;
  }

 private:
  int number_;
  std::string description_;
  bool ok_ = true;
  std::vector<std::string> details_;
  std::chrono::steady_clock::time_point start_;
};

RunConfig offline_config(std::uint64_t seed) {
  RunConfig config;
  config.seed = seed;
  config.embedding.config.dim = 32;
  config.workers = 2;
  return config;
}

// --- criterion 1 -------------------------------------------------------------

void criterion_formula_oracles() {
  Criterion c(1, "embedding metrics match brute-force formula transcriptions within 1e-9");
  SplitMix64 rng(101);
  const double tol = 1e-9;
  int checked = 0;
  for (int trial = 0; trial < 520; ++trial) {
    const std::size_t n = 1 + rng.next_below(3);
    const std::size_t t = 1 + rng.next_below(3);
    const std::size_t k = 1 + rng.next_below(3);
    auto h = testutil::random_bundle(n, 4, 2, rng);
    auto s = testutil::random_bundle(t, 4, 2, rng);
    auto r = testutil::random_bundle(k, 4, 2, rng);
    const auto close = [&](double a, double b, const char* name) {
      c.check(std::abs(a - b) <= tol, std::string(name) + " drifted from its oracle");
    };
    close(faithfulness_step(h.lib, s.lib), oracle::faithfulness_step(h.raw, s.raw),
          "faithfulness_step");
    close(faithfulness_token(h.lib, s.lib), oracle::faithfulness_token(h.raw, s.raw),
          "faithfulness_token");
    close(informativeness_step(h.lib, s.lib), oracle::informativeness_step(h.raw, s.raw),
          "informativeness_step");
    close(hallucination(h.lib, s.lib, r.lib), oracle::hallucination(h.raw, s.raw, r.raw),
          "hallucination");
    close(redundancy(h.lib, r.lib), oracle::redundancy(h.raw, r.raw), "redundancy");
    close(semantic_coverage_step(h.lib, r.lib, s.lib),
          oracle::semantic_coverage_step(h.raw, r.raw, s.raw), "semantic_coverage_step");
    close(reasoning_alignment(h.lib, r.lib), oracle::reasoning_alignment(h.raw, r.raw),
          "reasoning_alignment");
    close(commonsense(r.lib, h.lib, s.lib), oracle::commonsense(r.raw, h.raw, s.raw),
          "commonsense");
    close(missing_step(r.lib, h.lib), oracle::missing_step(r.raw, h.raw), "missing_step");
    close(informativeness_chain(h.lib, s.lib),
          oracle::informativeness_chain(h.raw, s.raw), "informativeness_chain");
    close(semantic_coverage_chain(r.lib, h.lib),
          oracle::semantic_coverage_chain(r.raw, h.raw), "semantic_coverage_chain");
    if (n >= 2) {
      close(*repetition_token(h.lib), oracle::repetition_token(h.raw), "repetition_token");
      close(*repetition_step(h.lib), oracle::repetition_step(h.raw), "repetition_step");
    }
    ++checked;
  }
  c.check(checked >= 500, "fewer than 500 randomized chains checked");
  c.finish(5.0);
}

// --- criterion 2 -------------------------------------------------------------

void criterion_range_fuzzing() {
  Criterion c(2, "all 18 metrics stay in [0,1] (or NotApplicable) on 1000 random chains");
  RunConfig config = offline_config(202);
  config.embedding.config.dim = 16;
  ChainScorer scorer(make_providers(config), {});
  SplitMix64 rng(202);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.next_below(4);
    const auto chain = testutil::random_chain("f" + std::to_string(i), 1 + rng.next_below(3),
                                              n, rng, i % 2 == 0);
    const ScoreReport report = scorer.score(chain);
    for (MetricId id : kAllMetrics) {
      const bool pairwise = id == MetricId::kRepetitionToken ||
                            id == MetricId::kRepetitionStep ||
                            id == MetricId::kSelfConsistency;
      if (const auto value = report.value(id)) {
        c.check(*value >= 0.0 && *value <= 1.0,
                std::string(to_string(id)) + " escaped [0,1]");
      } else {
        const bool allowed = (pairwise && n == 1) ||
                             (requires_reference(id) && !chain.has_reference());
        c.check(allowed, std::string(to_string(id)) + " unexpectedly not applicable");
      }
    }
  }
  c.finish(30.0);
}

// --- criterion 3 -------------------------------------------------------------

void criterion_somers_oracle() {
  Criterion c(3, "Somers' D equals the O(n^2) oracle exactly, worked examples included");
  SomersOptions d_only;
  d_only.permutations = 0;

  const std::vector<double> x = {0, 0, 1, 1};
  c.check(somers_d(x, std::vector<double>{1, 2, 3, 4}, d_only).d == 1.0, "D != 1");
  c.check(somers_d(x, std::vector<double>{4, 3, 2, 1}, d_only).d == -1.0, "D != -1");
  c.check(somers_d(x, std::vector<double>{1, 3, 2, 4}, d_only).d == 0.5, "D != 0.5");

  SplitMix64 rng(303);
  int instances = 0;
  while (instances < 200) {
    const std::size_t n = 2 + rng.next_below(199);
    std::vector<double> xs, ys;
    const int levels = 2 + static_cast<int>(rng.next_below(3));
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(static_cast<double>(rng.next_below(levels)));
      ys.push_back(static_cast<double>(rng.next_below(10)) / 3.0);  // tied y values
    }
    if (std::set<double>(xs.begin(), xs.end()).size() < 2) continue;
    const double produced = somers_d(xs, ys, d_only).d;
    c.check(produced == oracle::somers_d(xs, ys), "pair-count oracle mismatch");
    ++instances;
  }
  c.finish();
}

// --- criterion 4 -------------------------------------------------------------

void criterion_repetition_perfect_correlation() {
  Criterion c(4, "RepeatStep diagnostics give D = 1.000 (p < 0.05) on repetition metrics");
  SplitMix64 rng(404);
  std::vector<ReasoningChain> dataset;
  for (int i = 0; i < 200; ++i) {
    // EQASC-style: short chains of loosely related fact steps
    dataset.push_back(
        testutil::random_chain("eqasc" + std::to_string(i), 2, 2 + rng.next_below(4), rng,
                               true));
  }
  const std::vector<PerturbationRule> rules = {PerturbationRule::kRepeatStep};
  const auto diagnostics = build_diagnostics(dataset, rules, 0.5, 4040);

  RunConfig config = offline_config(404);
  config.metrics = {MetricId::kRepetitionToken, MetricId::kRepetitionStep};
  ChainScorer scorer(make_providers(config), {config.metrics});

  for (MetricId id : config.metrics) {
    std::vector<double> x, y;
    for (const PerturbedChain& pc : diagnostics) {
      const ScoreReport report = scorer.score(pc.to_chain());
      const auto value = report.value(id);
      if (!value) continue;
      x.push_back(pc.perturbed() ? 0.0 : 1.0);
      y.push_back(*value);
      if (pc.perturbed())
        c.check(*value == 0.0, std::string(to_string(id)) + " != 0 on a duplicated chain");
    }
    SomersOptions options;
    options.permutations = 10000;
    options.seed = 44;
    const CorrelationResult result = somers_d(x, y, options);
    c.check(result.d == 1.0, std::string(to_string(id)) + ": D = " +
                                 std::to_string(result.d) + " != 1.000");
    c.check(result.p_value < 0.05, std::string(to_string(id)) + ": p not significant");
  }
  c.finish(30.0);
}

// --- criterion 5 -------------------------------------------------------------

void criterion_reference_identity() {
  Criterion c(5, "h == r scores are exact; detected negations zero the consistency scores");
  // every step is an "<entity> is <word>." fact, the facts also appear in the
  // source, and the first fact repeats so self-consistency can see its twin
  std::vector<ReasoningChain> dataset;
  SplitMix64 rng(505);
  static const char* kAdjectives[] = {"blue", "cold", "round", "heavy", "soft"};
  for (int i = 0; i < 40; ++i) {
    const std::string a = "Object" + std::to_string(i) + " is " +
                          kAdjectives[rng.next_below(5)] + ".";
    const std::string b = "Thing" + std::to_string(i) + " is " +
                          kAdjectives[rng.next_below(5)] + ".";
    const std::vector<std::string> reference = {a, b, a};
    const std::vector<std::string> source = {a, b, "What holds?"};
    dataset.emplace_back("neg" + std::to_string(i), make_steps(source),
                         make_steps(reference), make_steps(reference));
  }
  const std::vector<PerturbationRule> rules = {PerturbationRule::kNegateStep};
  const auto diagnostics = build_diagnostics(dataset, rules, 0.5, 5050);

  RunConfig config = offline_config(505);
  ChainScorer scorer(make_providers(config), {});

  const auto negation_equivalent = [](const Step& a, const Step& b) {
    if (a.text() == b.text()) return false;
    std::vector<Token> ta, tb;
    for (const Token& t : a.tokens()) {
      if (t != "not" && t != "never" && t != "no" && t != "n't") ta.push_back(t);
    }
    for (const Token& t : b.tokens()) {
      if (t != "not" && t != "never" && t != "no" && t != "n't") tb.push_back(t);
    }
    return ta == tb;
  };

  int source_detections = 0;
  int self_detections = 0;
  int clean_chains = 0;
  for (const PerturbedChain& pc : diagnostics) {
    const ReasoningChain chain = pc.to_chain();
    const ScoreReport report = scorer.score(chain);
    if (!pc.perturbed()) {
      ++clean_chains;
      c.check(report.value(MetricId::kReasoningAlignment) == 1.0,
              "reasoning_alignment != 1.0 on clean chain");
      c.check(report.value(MetricId::kMissingStep) == 1.0, "missing_step != 1.0");
      c.check(report.value(MetricId::kRedundancy) == 1.0, "redundancy != 1.0");
      c.check(report.value(MetricId::kSemanticCoverageChain) == 1.0,
              "semantic_coverage_chain != 1.0");
      c.check(report.value(MetricId::kSemanticCoverageStep) == 0.0,
              "semantic_coverage_step != 0.0");
      continue;
    }
    // the negated step contradicts its source twin whenever detected
    bool source_detected = false;
    for (const Step& h : chain.hypothesis()) {
      for (const Step& s : chain.source())
        source_detected = source_detected || negation_equivalent(h, s);
    }
    bool self_detected = false;
    for (std::size_t i = 0; i < chain.hypothesis().size(); ++i) {
      for (std::size_t j = 0; j < i; ++j)
        self_detected = self_detected ||
                        negation_equivalent(chain.hypothesis()[i], chain.hypothesis()[j]);
    }
    if (source_detected) {
      ++source_detections;
      c.check(report.value(MetricId::kSourceConsistency) == 0.0,
              "source_consistency != 0.0 on a detected negation");
    }
    if (self_detected) {
      ++self_detections;
      c.check(report.value(MetricId::kSelfConsistency) == 0.0,
              "self_consistency != 0.0 on a detected negation");
    }
  }
  c.check(clean_chains > 0, "no clean chains exercised the identity checks");
  c.check(source_detections > 0, "no negation was detectable against the source");
  c.check(self_detections > 0, "no negation was detectable within the hypothesis");
  c.finish();
}

// --- criterion 6 -------------------------------------------------------------

void criterion_perturbation_replay() {
  Criterion c(6, "recorded perturbations replay byte-exactly; canonical patterns hold");
  std::vector<std::vector<std::string>> chains;
  for (int i = 0; i < 100; ++i) {
    // rich steps so all 12 rules apply: auxiliaries, entities, and at least
    // two distinct numbers and operators per chain
    std::vector<std::string> steps;
    const int n = 3 + i % 3;
    const char ops[] = {'+', '-', '*', '/'};
    for (int s = 0; s < n; ++s) {
      steps.push_back("Agent" + std::to_string(i) + " is near Point" +
                      std::to_string(s + 10) + " and adds " + std::to_string(s) +
                      std::string(1, ops[s % 4]) + std::to_string(s + 1) + "=" +
                      std::to_string(2 * s + 1) + " now.");
    }
    chains.push_back(std::move(steps));
  }
  StepPool pool;
  pool.steps = {"Extra fact one is here.", "Extra fact two is there."};
  pool.entities = {"Quartz", "Basalt"};

  int replays = 0;
  for (const auto& steps : chains) {
    for (PerturbationRule rule : kAllRules) {
      for (std::uint64_t seed_index = 0; seed_index < 3; ++seed_index) {
        const std::uint64_t seed = derive_seed(606, replays + seed_index);
        try {
          const ApplyOutcome outcome = apply_rule(steps, rule, seed, &pool);
          const std::vector<AppliedPerturbation> applied = {outcome.applied};
          c.check(replay(steps, applied, &pool) == outcome.steps,
                  std::string(to_string(rule)) + " replay diverged");
          c.check(outcome.steps != steps,
                  std::string(to_string(rule)) + " produced an unchanged chain");
          ++replays;
        } catch (const Error& e) {
          c.check(e.code() == errc::rule_inapplicable, "unexpected error kind");
          c.check(false, std::string(to_string(rule)) + " inapplicable on a rich chain");
        }
      }
    }
  }
  c.check(replays >= 100 * 12 * 3 - 2, "not every rule/seed combination replayed");

  // canonical fixed-position patterns
  const std::vector<std::string> r3 = {"r one is a.", "r two is b.", "r three is c."};
  bool repeat_seen = false, swap_seen = false, remove_seen = false;
  for (std::uint64_t seed = 0; seed < 1000 && !(repeat_seen && swap_seen && remove_seen);
       ++seed) {
    const auto rep = apply_rule(r3, PerturbationRule::kRepeatStep, seed);
    if (rep.steps == std::vector<std::string>{r3[0], r3[1], r3[1], r3[2]})
      repeat_seen = true;
    const auto swp = apply_rule(r3, PerturbationRule::kSwapStep, seed);
    if (swp.steps == std::vector<std::string>{r3[1], r3[0], r3[2]}) swap_seen = true;
    const auto rem = apply_rule(r3, PerturbationRule::kRemoveStep, seed);
    if (rem.steps == std::vector<std::string>{r3[1], r3[2]}) remove_seen = true;
  }
  c.check(repeat_seen, "[r1,r2,r3] -> [r1,r2,r2,r3] pattern unreachable");
  c.check(swap_seen, "[r1,r2,r3] -> [r2,r1,r3] pattern unreachable");
  c.check(remove_seen, "[r1,r2,r3] -> [r2,r3] pattern unreachable");
  c.finish();
}

// --- criterion 7 -------------------------------------------------------------

void criterion_sensitivity_monotone() {
  Criterion c(7, "repetition scores degrade monotonically across injection levels");
  SplitMix64 rng(707);
  std::vector<ReasoningChain> dataset;
  for (int i = 0; i < 100; ++i)
    dataset.push_back(testutil::random_chain("sens" + std::to_string(i), 2,
                                             3 + rng.next_below(3), rng, true));
  const std::vector<PerturbationRule> rules = {PerturbationRule::kRepeatStep,
                                               PerturbationRule::kRemoveStep};
  RunConfig config = offline_config(707);
  config.metrics = {MetricId::kRepetitionToken, MetricId::kRepetitionStep};
  ChainScorer scorer(make_providers(config), {config.metrics});

  for (MetricId id : config.metrics) {
    int monotone = 0, total = 0;
    for (const ReasoningChain& chain : dataset) {
      const StepPool pool = build_pool(dataset, chain.id());
      const auto variants =
          inject_levels(chain, 3, derive_seed(7070, chain.id()), pool, rules);
      std::vector<double> scores;
      bool usable = true;
      for (const auto& [level, pc] : variants) {
        const auto value = scorer.score(pc.to_chain()).value(id);
        if (!value) {
          usable = false;
          break;
        }
        scores.push_back(*value);
      }
      if (!usable) continue;
      ++total;
      if (scores[0] >= scores[1] && scores[1] >= scores[2]) ++monotone;
    }
    c.check(total >= 95, "too few usable chains");
    c.check(monotone * 100 >= total * 95,
            std::string(to_string(id)) + ": only " + std::to_string(monotone) + "/" +
                std::to_string(total) + " chains monotone");
  }
  c.finish();
}

// --- criterion 8 -------------------------------------------------------------

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

void criterion_end_to_end_determinism(const std::string& cli) {
  Criterion c(8, "perturb -> score -> meta-eval -> report is byte-identical across runs");
  if (cli.empty()) {
    c.check(false, "no CLI path supplied (pass it as argv[1])");
    c.finish();
    return;
  }
  testutil::TempDir dir("acceptance_e2e");
  const auto refs = dir.path() / "refs.jsonl";
  std::ostringstream content;
  SplitMix64 rng(808);
  for (int i = 0; i < 80; ++i) {
    const auto chain =
        testutil::random_chain("e2e" + std::to_string(i), 2, 3 + rng.next_below(3), rng, true);
    content << chain_to_json_line(chain) << '\n';
  }
  testutil::write_file(refs, content.str());

  const auto run_pipeline = [&](const std::string& tag) {
    const auto base = dir.path() / tag;
    std::filesystem::create_directories(base);
    const std::string diag = (base / "diag.jsonl").string();
    const std::string scores = (base / "scores.jsonl").string();
    const std::string meta = (base / "meta.csv").string();
    const std::string report = (base / "report.csv").string();
    const std::string quiet = " 2>" + (base / "stderr.txt").string();
    c.check(run_command(cli + " perturb --input " + refs.string() + " --output " + diag +
                        " --seed 11 --rules repeat_step,remove_step,swap_step" + quiet) == 0,
            "perturb failed in " + tag);
    c.check(run_command(cli + " score --input " + diag + " --output " + scores +
                        " --seed 11 --workers 4" + quiet) == 0,
            "score failed in " + tag);
    c.check(run_command(cli + " meta-eval --input " + scores + " --labels " + diag +
                        " --output " + meta + " --seed 11" + quiet) == 0,
            "meta-eval failed in " + tag);
    c.check(run_command(cli + " report --input " + scores + " --labels " + diag +
                        " --output " + report + " --group-by metric,perturbed" + quiet) == 0,
            "report failed in " + tag);
    return std::vector<std::string>{testutil::read_file(diag), testutil::read_file(scores),
                                    testutil::read_file(meta), testutil::read_file(report)};
  };

  const auto first = run_pipeline("run1");
  const auto second = run_pipeline("run2");
  const char* stages[] = {"perturb", "score", "meta-eval", "report"};
  for (std::size_t i = 0; i < first.size(); ++i) {
    c.check(!first[i].empty(), std::string(stages[i]) + " produced no output");
    c.check(first[i] == second[i], std::string(stages[i]) + " output differs between runs");
  }
  c.finish(60.0);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion_formula_oracles();
  criterion_range_fuzzing();
  criterion_somers_oracle();
  criterion_repetition_perfect_correlation();
  criterion_reference_identity();
  criterion_perturbation_replay();
  criterion_sensitivity_monotone();
  criterion_end_to_end_determinism(cli);
  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
