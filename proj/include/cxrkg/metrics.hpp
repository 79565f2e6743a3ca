#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "cxrkg/kg.hpp"
#include "cxrkg/label.hpp"
#include "cxrkg/ratio.hpp"
#include "cxrkg/record.hpp"

namespace cxrkg {

enum class Cell { tp, fp, tn, fn };

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  void add(Cell c);
  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// pair: a generated (disease, organ) must equal a ground-truth one.
// keyword: matching disease keywords suffice, organs ignored.
enum class MatchMode { pair, keyword };
enum class DiversityMode { reference_set, kg_total };

std::string_view to_string(MatchMode m);
std::string_view to_string(DiversityMode m);
MatchMode parse_match_mode(std::string_view s);
// Throws Error on anything other than reference-set|kg-total.
DiversityMode parse_diversity_mode(std::string_view s);

struct DorValue {
  bool infinite = false;
  Ratio value;

  // "inf" or four decimals.
  std::string render() const;
  double to_double() const;
  friend bool operator==(const DorValue&, const DorValue&) = default;
};

// Throws IdMismatchError if the two reports carry different ids.
Cell classify_pair(const LabeledReport& gt, const LabeledReport& gen, MatchMode mode = MatchMode::pair);

// tp / (tp + fn); 0 when there is no positive ground truth.
Ratio sensitivity(const ConfusionCounts& cc);

struct DiversityResult {
  Ratio value;
  // Every type that appears in the generated reports.
  std::set<DiseasePair> types;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  // Set when the denominator was 0 and `value` is the 0 sentinel.
  bool empty_denominator = false;
};

// reference-set: generated types that occur in `reference`, over the
// distinct types in `reference`. kg-total: generated types known to the
// graph, over the graph's (disease, organ) pairs.
DiversityResult diversity(std::span<const LabeledReport> generated, DiversityMode mode, const KnowledgeGraph& kg,
                          std::span<const LabeledReport> reference = {});

// Harmonic mean; 0 when sen + div == 0.
double ds(double sen, double div);
Ratio ds(const Ratio& sen, const Ratio& div);

// tp*tn / (fp*fn). 0 when tp*tn == 0, infinite when only fp*fn == 0.
// With `haldane`, 0.5 is added to every cell whenever any cell is 0.
DorValue dor(const ConfusionCounts& cc, bool haldane = false);

struct EvalConfig {
  DiversityMode diversity_mode = DiversityMode::reference_set;
  MatchMode match_mode = MatchMode::pair;
  bool haldane = false;
};

struct MetricsSummary {
  ConfusionCounts confusion;
  Ratio sensitivity;
  Ratio diversity;
  Ratio ds;
  DorValue dor;
  std::set<DiseasePair> generated_disease_types;
  DiversityMode diversity_denominator_mode = DiversityMode::reference_set;
  MatchMode match_mode = MatchMode::pair;
  bool haldane = false;
  std::size_t diversity_numerator = 0;
  std::size_t diversity_denominator = 0;

  friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

// Joins the two corpora by id (order-insensitive). Throws IdMismatchError
// listing missing and extra ids.
MetricsSummary evaluate(const KnowledgeGraph& kg, std::span<const ReportRecord> gt,
                        std::span<const ReportRecord> generated, const EvalConfig& config = {});

std::string summary_to_json(const MetricsSummary& summary);

// Columns DOR, DS, Sen., Div.
std::string summary_table(const MetricsSummary& summary, std::string_view row_name = "generated");

// Corpus BLEU-n over id-aligned corpora: clipped n-gram precision, add-one
// smoothing for orders above 1, brevity penalty. n must be in [1, 4].
double bleu_n(std::span<const ReportRecord> generated, std::span<const ReportRecord> gt, int n);

}  // namespace cxrkg
