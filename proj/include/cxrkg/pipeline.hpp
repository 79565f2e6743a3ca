#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cxrkg/kg.hpp"
#include "cxrkg/label.hpp"
#include "cxrkg/metrics.hpp"
#include "cxrkg/record.hpp"

namespace cxrkg {

struct Decision {
  std::string id;
  ReportClass decision = ReportClass::disease_free;

  friend bool operator==(const Decision&, const Decision&) = default;
};

using Decisions = std::vector<Decision>;

// One {"id", "decision"} object per line; decision is disease-free|disease-specific.
Decisions parse_decisions(std::string_view jsonl);
Decisions load_decisions(const std::filesystem::path& path);
std::string decisions_to_jsonl(std::span<const Decision> decisions);

// Ground-truth report class per record, each flipped independently with
// probability flip_rate (in [0, 1]) from a seeded mt19937_64 stream.
Decisions oracle_classifier(const KnowledgeGraph& kg, std::span<const ReportRecord> gt, double flip_rate,
                            std::uint64_t seed);

struct RoutingCase {
  std::string id;
  ReportClass classifier_decision = ReportClass::disease_free;
  std::string chosen_output;
  // Generator channel that supplied chosen_output.
  ReportClass source = ReportClass::disease_free;
};

struct RoutedCorpus {
  std::vector<ReportRecord> corpus;
  std::vector<RoutingCase> log;
};

// Picks, per decision and in decision order, the record from the matching
// generator channel. All three inputs must share one id set.
RoutedCorpus route(std::span<const Decision> decisions, std::span<const ReportRecord> free_outputs,
                   std::span<const ReportRecord> specific_outputs);

std::string routing_log_to_jsonl(std::span<const RoutingCase> log);

MetricsSummary evaluate_pipeline(const KnowledgeGraph& kg, std::span<const ReportRecord> gt,
                                 std::span<const Decision> decisions, std::span<const ReportRecord> free_outputs,
                                 std::span<const ReportRecord> specific_outputs, const EvalConfig& config = {});

}  // namespace cxrkg
