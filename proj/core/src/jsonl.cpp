#include "reasonscore/jsonl.hpp"

#include <fstream>

#include "json.hpp"
#include "reasonscore/error.hpp"

namespace reasonscore {
namespace {

using nlohmann::json;

const char* const kKnownFields[] = {"id",     "source",        "hypothesis",
                                    "reference", "labels",     "perturbations"};

bool is_known_field(const std::string& key) {
  for (const char* k : kKnownFields) {
    if (key == k) return true;
  }
  return false;
}

std::vector<std::string> string_array(const json& j, const std::string& field) {
  if (!j.is_array()) fail(errc::schema, "field '" + field + "' must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const json& item : j) {
    if (!item.is_string())
      fail(errc::schema, "field '" + field + "' must contain strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

ReasoningChain chain_from_json_line(const std::string& line,
                                    const ChainReadOptions& options) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    fail(errc::schema, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(errc::schema, "chain line must be a JSON object");
  if (!j.contains("id") || !j["id"].is_string())
    fail(errc::schema, "chain needs a string 'id'");
  if (!j.contains("source")) fail(errc::schema, "chain needs a 'source' array");

  std::optional<std::vector<Step>> reference;
  if (j.contains("reference"))
    reference = make_steps(string_array(j["reference"], "reference"));

  std::vector<std::string> hypothesis_texts;
  if (j.contains("hypothesis")) {
    hypothesis_texts = string_array(j["hypothesis"], "hypothesis");
  } else if (options.hypothesis_defaults_to_reference && reference) {
    hypothesis_texts = step_texts(*reference);
  } else {
    fail(errc::schema, "chain needs a 'hypothesis' array");
  }

  std::optional<ErrorLabels> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_object()) fail(errc::schema, "'labels' must be an object");
    ErrorLabels parsed;
    for (const auto& [key, value] : j["labels"].items()) {
      const auto type = error_type_from_string(key);
      if (!type) fail(errc::schema, "unknown error type in labels: " + key);
      if (!value.is_boolean()) fail(errc::schema, "label values must be booleans");
      parsed[*type] = value.get<bool>();
    }
    labels = std::move(parsed);
  }

  std::vector<std::string> perturbations;
  if (j.contains("perturbations"))
    perturbations = string_array(j["perturbations"], "perturbations");

  try {
    ReasoningChain chain(j["id"].get<std::string>(),
                         make_steps(string_array(j["source"], "source")),
                         make_steps(hypothesis_texts), std::move(reference),
                         std::move(labels), std::move(perturbations));
    json extra = json::object();
    for (const auto& [key, value] : j.items()) {
      if (!is_known_field(key)) extra[key] = value;
    }
    if (!extra.empty()) chain.set_extra_json(extra.dump());
    return chain;
  } catch (const Error& e) {
    fail(errc::schema, e.what());
  }
}

std::string chain_to_json_line(const ReasoningChain& chain) {
  json j = chain.extra_json().empty() ? json::object() : json::parse(chain.extra_json());
  j["id"] = chain.id();
  j["source"] = step_texts(chain.source());
  j["hypothesis"] = step_texts(chain.hypothesis());
  if (chain.has_reference()) j["reference"] = step_texts(*chain.reference());
  if (chain.labels()) {
    json labels = json::object();
    for (const auto& [type, value] : *chain.labels())
      labels[std::string(to_string(type))] = value;
    j["labels"] = std::move(labels);
  }
  if (!chain.perturbations().empty() || chain.labels())
    j["perturbations"] = chain.perturbations();
  return j.dump();
}

std::vector<ReasoningChain> read_chains(const std::filesystem::path& path,
                                        const ChainReadOptions& options) {
  std::ifstream in(path);
  if (!in) fail(errc::schema, "cannot open input file: " + path.string());
  std::vector<ReasoningChain> chains;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      chains.push_back(chain_from_json_line(line, options));
    } catch (const Error& e) {
      fail(errc::schema, "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  if (chains.empty()) fail(errc::schema, "no chains in " + path.string());
  return chains;
}

void write_chains(const std::filesystem::path& path,
                  std::span<const ReasoningChain> chains) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::schema, "cannot open output file: " + path.string());
  for (const ReasoningChain& chain : chains) out << chain_to_json_line(chain) << '\n';
}

std::string report_to_json_line(const ScoreReport& report,
                                std::span<const MetricId> selected) {
  json scores = json::object();
  json orientations = json::object();
  json not_applicable = json::array();
  for (MetricId id : selected) {
    const std::string name(to_string(id));
    const auto value = report.value(id);
    scores[name] = value ? json(*value) : json(nullptr);
    orientations[name] = std::string(to_string(orientation(id)));
    if (!value) not_applicable.push_back(name);
  }
  return json{{"id", report.chain_id()},
              {"scores", std::move(scores)},
              {"orientation", std::move(orientations)},
              {"not_applicable", std::move(not_applicable)}}
      .dump();
}

std::string score_csv_header(std::span<const MetricId> selected) {
  std::string header = "id";
  for (MetricId id : selected) {
    header += ',';
    header += to_string(id);
  }
  return header;
}

std::string report_to_csv_row(const ScoreReport& report,
                              std::span<const MetricId> selected) {
  std::string row = report.chain_id();
  for (MetricId id : selected) {
    row += ',';
    if (const auto value = report.value(id)) row += json(*value).dump();
  }
  return row;
}

std::vector<ScoreRow> read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::schema, "cannot open scores file: " + path.string());
  std::vector<ScoreRow> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(errc::schema,
           "line " + std::to_string(line_number) + ": invalid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("scores") ||
        !j["scores"].is_object())
      fail(errc::schema, "line " + std::to_string(line_number) +
                             ": score lines need 'id' and a 'scores' object");
    ScoreRow row;
    row.chain_id = j["id"].get<std::string>();
    for (const auto& [key, value] : j["scores"].items()) {
      if (value.is_null())
        row.scores[key] = std::nullopt;
      else if (value.is_number())
        row.scores[key] = value.get<double>();
      else
        fail(errc::schema, "line " + std::to_string(line_number) +
                               ": score values must be numbers or null");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(errc::schema, "no score rows in " + path.string());
  return rows;
}

std::string extra_string_field(const ReasoningChain& chain, const std::string& key) {
  if (chain.extra_json().empty()) return "";
  const json extra = json::parse(chain.extra_json());
  if (!extra.contains(key) || !extra[key].is_string()) return "";
  return extra[key].get<std::string>();
}

}  // namespace reasonscore
