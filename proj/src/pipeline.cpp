#include "cxrkg/pipeline.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "cxrkg/error.hpp"
#include "cxrkg/io.hpp"

namespace cxrkg {

using ojson = nlohmann::ordered_json;

Decisions parse_decisions(std::string_view jsonl) {
  Decisions out;
  std::unordered_set<std::string> ids;
  for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    const std::string where = "line " + std::to_string(line_no);
    ojson obj;
    try {
      obj = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
      throw FormatError(where + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("decision") || !obj["id"].is_string() ||
        !obj["decision"].is_string()) {
      throw FormatError(where + ": expected {\"id\": string, \"decision\": string}");
    }
    Decision d;
    d.id = obj["id"].get<std::string>();
    try {
      d.decision = parse_report_class(obj["decision"].get<std::string>());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (!ids.insert(d.id).second) throw FormatError(where + ": duplicate id '" + d.id + "'");
    out.push_back(std::move(d));
  });
  return out;
}

Decisions load_decisions(const std::filesystem::path& path) {
  try {
    return parse_decisions(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string decisions_to_jsonl(std::span<const Decision> decisions) {
  std::string out;
  for (const auto& d : decisions) {
    ojson obj = ojson::object();
    obj["id"] = d.id;
    obj["decision"] = std::string(to_string(d.decision));
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

Decisions oracle_classifier(const KnowledgeGraph& kg, std::span<const ReportRecord> gt, double flip_rate,
                            std::uint64_t seed) {
  if (!(flip_rate >= 0.0 && flip_rate <= 1.0)) throw Error("flip rate must lie in [0, 1]");
  const auto labels = label_reports(kg, gt);
  std::mt19937_64 rng(seed);
  Decisions out;
  out.reserve(gt.size());
  for (const auto& l : labels) {
    // 53-bit uniform in [0, 1); one draw per record regardless of outcome.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    auto decision = l.report_class;
    if (u < flip_rate) {
      decision = decision == ReportClass::disease_free ? ReportClass::disease_specific : ReportClass::disease_free;
    }
    out.push_back({l.record.id, decision});
  }
  return out;
}

namespace {

std::unordered_map<std::string, std::size_t> index_channel(std::span<const ReportRecord> records,
                                                           std::span<const Decision> decisions) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!index.emplace(records[i].id, i).second) throw FormatError("duplicate id '" + records[i].id + "'");
  }
  std::unordered_set<std::string> wanted;
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const auto& d : decisions) {
    wanted.insert(d.id);
    if (!index.contains(d.id)) missing.push_back(d.id);
  }
  for (const auto& r : records) {
    if (!wanted.contains(r.id)) extra.push_back(r.id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::sort(missing.begin(), missing.end());
    std::sort(extra.begin(), extra.end());
    throw IdMismatchError(std::move(missing), std::move(extra));
  }
  return index;
}

}  // namespace

RoutedCorpus route(std::span<const Decision> decisions, std::span<const ReportRecord> free_outputs,
                   std::span<const ReportRecord> specific_outputs) {
  std::unordered_set<std::string> seen;
  for (const auto& d : decisions) {
    if (!seen.insert(d.id).second) throw FormatError("duplicate decision for id '" + d.id + "'");
  }
  const auto free_index = index_channel(free_outputs, decisions);
  const auto specific_index = index_channel(specific_outputs, decisions);

  RoutedCorpus out;
  out.corpus.reserve(decisions.size());
  out.log.reserve(decisions.size());
  for (const auto& d : decisions) {
    const bool specific = d.decision == ReportClass::disease_specific;
    const auto& record =
        specific ? specific_outputs[specific_index.at(d.id)] : free_outputs[free_index.at(d.id)];
    out.corpus.push_back(record);
    out.log.push_back({d.id, d.decision, record.text, d.decision});
  }
  return out;
}

std::string routing_log_to_jsonl(std::span<const RoutingCase> log) {
  std::string out;
  for (const auto& c : log) {
    ojson obj = ojson::object();
    obj["id"] = c.id;
    obj["classifier_decision"] = std::string(to_string(c.classifier_decision));
    obj["source"] = std::string(to_string(c.source)) + "-generator";
    obj["chosen_output"] = c.chosen_output;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

MetricsSummary evaluate_pipeline(const KnowledgeGraph& kg, std::span<const ReportRecord> gt,
                                 std::span<const Decision> decisions, std::span<const ReportRecord> free_outputs,
                                 std::span<const ReportRecord> specific_outputs, const EvalConfig& config) {
  const auto routed = route(decisions, free_outputs, specific_outputs);
  return evaluate(kg, gt, routed.corpus, config);
}

}  // namespace cxrkg
