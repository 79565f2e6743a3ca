#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cxrkg/label.hpp"
#include "cxrkg/ratio.hpp"
#include "cxrkg/record.hpp"

namespace cxrkg {

inline constexpr std::size_t kDefaultCommonThreshold = 20;

// One JSON object per line: id, text, split, optional images.
std::vector<ReportRecord> parse_corpus(std::string_view jsonl);
std::vector<ReportRecord> load_corpus(const std::filesystem::path& path);
std::string corpus_to_jsonl(std::span<const ReportRecord> records);
void write_corpus(std::span<const ReportRecord> records, const std::filesystem::path& path);

// Throws FormatError naming the first repeated id.
void check_unique_ids(std::span<const ReportRecord> records);

using DiseaseCounts = std::map<DiseasePair, std::size_t>;

struct SentenceClassCounts {
  std::size_t d_free = 0;
  std::size_t d_com = 0;
  std::size_t d_tail = 0;

  std::size_t total() const { return d_free + d_com + d_tail; }
  friend bool operator==(const SentenceClassCounts&, const SentenceClassCounts&) = default;
};

struct DiseaseStats {
  // Number of sentences whose label contains the pair.
  DiseaseCounts disease_counts;
  SentenceClassCounts sentence_class_counts;
  std::size_t common_threshold = kDefaultCommonThreshold;
  std::size_t total_occurrences = 0;
  // Ratio::undefined() when total_occurrences == 0.
  Ratio common_share = Ratio::undefined();
  Ratio tail_share = Ratio::undefined();

  bool is_common(const DiseasePair& p) const;
};

// Sentence-level pair incidence over already-labeled reports.
DiseaseCounts count_diseases(std::span<const LabeledReport> reports);

// A pair is common iff its count >= common_threshold (must be >= 1).
DiseaseStats stats_from_labels(std::span<const LabeledReport> reports, std::size_t common_threshold);
DiseaseStats corpus_stats(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                          std::size_t common_threshold = kDefaultCommonThreshold);

std::string stats_to_json(const DiseaseStats& stats);

// Bars sorted by descending count, ties by label.
std::string render_histogram(const DiseaseStats& stats, std::size_t bar_width = 50);

struct Partition {
  std::vector<ReportRecord> disease_free;
  std::vector<ReportRecord> disease_specific;
};

// Stable: each side keeps input order.
Partition partition_by_class(const KnowledgeGraph& kg, std::span<const ReportRecord> records);

}  // namespace cxrkg
