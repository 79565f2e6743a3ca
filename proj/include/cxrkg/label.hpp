#pragma once

#include <compare>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cxrkg/kg.hpp"
#include "cxrkg/record.hpp"

namespace cxrkg {

struct DiseasePair {
  std::string disease;
  std::string organ;

  // "disease-organ"
  std::string str() const { return disease + "-" + organ; }

  friend auto operator<=>(const DiseasePair&, const DiseasePair&) = default;
};

// Sorted, duplicate-free list of disease/organ pairs. Empty means normal.
class SentenceLabel {
 public:
  SentenceLabel() = default;
  explicit SentenceLabel(std::vector<DiseasePair> pairs);

  const std::vector<DiseasePair>& pairs() const { return pairs_; }
  bool normal() const { return pairs_.empty(); }

  // "bronchovascular crowding-lung-low volume-lung", or "normal". Lossy for
  // phrases containing '-'; pairs() is authoritative.
  std::string render() const;

  friend bool operator==(const SentenceLabel&, const SentenceLabel&) = default;

 private:
  std::vector<DiseasePair> pairs_;
};

enum class ReportClass { disease_free, disease_specific };

std::string_view to_string(ReportClass c);
ReportClass parse_report_class(std::string_view s);

struct LabeledReport {
  ReportRecord record;
  std::vector<std::string> sentences;
  std::vector<SentenceLabel> sentence_labels;
  ReportClass report_class = ReportClass::disease_free;
  std::set<DiseasePair> disease_set;
};

// Whitespace inside each sentence is collapsed.
std::vector<std::string> split_sentences(std::string_view text);

SentenceLabel label_sentence(const KnowledgeGraph& kg, std::string_view sentence);

LabeledReport label_report(const KnowledgeGraph& kg, const ReportRecord& record);

// Output is index-aligned with `records` whatever the thread count.
// threads == 0 uses default_threads().
std::vector<LabeledReport> label_reports(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                                         unsigned threads = 0);

void set_default_threads(unsigned n);
unsigned default_threads();

}  // namespace cxrkg
