#include "cxrkg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "cxrkg/error.hpp"

namespace cxrkg {

void ConfusionCounts::add(Cell c) {
  switch (c) {
    case Cell::tp:
      ++tp;
      break;
    case Cell::fp:
      ++fp;
      break;
    case Cell::tn:
      ++tn;
      break;
    case Cell::fn:
      ++fn;
      break;
  }
}

std::string_view to_string(MatchMode m) { return m == MatchMode::pair ? "pair" : "keyword"; }

std::string_view to_string(DiversityMode m) {
  return m == DiversityMode::reference_set ? "reference-set" : "kg-total";
}

MatchMode parse_match_mode(std::string_view s) {
  if (s == "pair") return MatchMode::pair;
  if (s == "keyword") return MatchMode::keyword;
  throw Error("unknown match mode '" + std::string(s) + "' (expected pair|keyword)");
}

DiversityMode parse_diversity_mode(std::string_view s) {
  if (s == "reference-set") return DiversityMode::reference_set;
  if (s == "kg-total") return DiversityMode::kg_total;
  throw Error("unknown diversity mode '" + std::string(s) + "' (expected reference-set|kg-total)");
}

std::string DorValue::render() const { return infinite ? "inf" : value.fixed4(); }

double DorValue::to_double() const { return infinite ? std::numeric_limits<double>::infinity() : value.value(); }

Cell classify_pair(const LabeledReport& gt, const LabeledReport& gen, MatchMode mode) {
  if (gt.record.id != gen.record.id) throw IdMismatchError({gt.record.id}, {gen.record.id});
  const bool gt_specific = gt.report_class == ReportClass::disease_specific;
  if (!gt_specific) return gen.report_class == ReportClass::disease_free ? Cell::tn : Cell::fp;

  bool hit = false;
  if (mode == MatchMode::pair) {
    hit = std::any_of(gen.disease_set.begin(), gen.disease_set.end(),
                      [&](const DiseasePair& p) { return gt.disease_set.contains(p); });
  } else {
    std::set<std::string> keywords;
    for (const auto& p : gt.disease_set) keywords.insert(p.disease);
    hit = std::any_of(gen.disease_set.begin(), gen.disease_set.end(),
                      [&](const DiseasePair& p) { return keywords.contains(p.disease); });
  }
  return hit ? Cell::tp : Cell::fn;
}

Ratio sensitivity(const ConfusionCounts& cc) {
  if (cc.tp + cc.fn == 0) return Ratio(0, 1);
  return Ratio(static_cast<std::int64_t>(cc.tp), static_cast<std::int64_t>(cc.tp + cc.fn));
}

DiversityResult diversity(std::span<const LabeledReport> generated, DiversityMode mode, const KnowledgeGraph& kg,
                          std::span<const LabeledReport> reference) {
  DiversityResult out;
  for (const auto& r : generated) out.types.insert(r.disease_set.begin(), r.disease_set.end());

  std::set<DiseasePair> universe;
  if (mode == DiversityMode::reference_set) {
    for (const auto& r : reference) universe.insert(r.disease_set.begin(), r.disease_set.end());
  } else {
    for (const auto& e : kg.entries()) universe.insert({e.disease, e.organ});
  }
  out.denominator = universe.size();
  out.numerator = static_cast<std::size_t>(
      std::count_if(out.types.begin(), out.types.end(), [&](const DiseasePair& p) { return universe.contains(p); }));
  if (out.denominator == 0) {
    out.empty_denominator = true;
    out.value = Ratio(0, 1);
  } else {
    out.value = Ratio(static_cast<std::int64_t>(out.numerator), static_cast<std::int64_t>(out.denominator));
  }
  return out;
}

double ds(double sen, double div) {
  if (sen + div == 0.0) return 0.0;
  return 2.0 * sen * div / (sen + div);
}

Ratio ds(const Ratio& sen, const Ratio& div) {
  const auto sum = sen + div;
  if (!sum.defined() || sum.is_zero()) return Ratio(0, 1);
  return Ratio(2, 1) * sen * div / sum;
}

DorValue dor(const ConfusionCounts& cc, bool haldane) {
  auto tp = static_cast<std::int64_t>(cc.tp);
  auto tn = static_cast<std::int64_t>(cc.tn);
  auto fp = static_cast<std::int64_t>(cc.fp);
  auto fn = static_cast<std::int64_t>(cc.fn);
  if (haldane && (tp == 0 || tn == 0 || fp == 0 || fn == 0)) {
    // Doubling every cell keeps the odds ratio while making the +0.5 integral.
    return {false, Ratio((2 * tp + 1) * (2 * tn + 1), (2 * fp + 1) * (2 * fn + 1))};
  }
  if (tp * tn == 0) return {false, Ratio(0, 1)};
  if (fp * fn == 0) return {true, Ratio(0, 1)};
  return {false, Ratio(tp * tn, fp * fn)};
}

namespace {

// Index of `gen` by id, checked against the ground-truth id set.
std::vector<std::size_t> align_by_id(std::span<const ReportRecord> gt, std::span<const ReportRecord> gen) {
  std::unordered_map<std::string, std::size_t> gen_index;
  std::vector<std::string> extra;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    if (!gen_index.emplace(gen[i].id, i).second) throw FormatError("duplicate id '" + gen[i].id + "'");
  }
  std::vector<std::size_t> aligned(gt.size());
  std::vector<std::string> missing;
  std::unordered_map<std::string, bool> gt_ids;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_ids.emplace(gt[i].id, true).second) throw FormatError("duplicate id '" + gt[i].id + "'");
    const auto it = gen_index.find(gt[i].id);
    if (it == gen_index.end()) {
      missing.push_back(gt[i].id);
    } else {
      aligned[i] = it->second;
    }
  }
  for (const auto& r : gen) {
    if (!gt_ids.contains(r.id)) extra.push_back(r.id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::sort(missing.begin(), missing.end());
    std::sort(extra.begin(), extra.end());
    throw IdMismatchError(std::move(missing), std::move(extra));
  }
  return aligned;
}

}  // namespace

MetricsSummary evaluate(const KnowledgeGraph& kg, std::span<const ReportRecord> gt,
                        std::span<const ReportRecord> generated, const EvalConfig& config) {
  const auto aligned = align_by_id(gt, generated);

  // Fixed id order so the result does not depend on input order.
  std::vector<std::size_t> order(gt.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gt[a].id < gt[b].id; });
  std::vector<ReportRecord> gt_sorted;
  std::vector<ReportRecord> gen_sorted;
  gt_sorted.reserve(order.size());
  gen_sorted.reserve(order.size());
  for (const auto i : order) {
    gt_sorted.push_back(gt[i]);
    gen_sorted.push_back(generated[aligned[i]]);
  }
  const auto gt_labels = label_reports(kg, gt_sorted);
  const auto gen_labels = label_reports(kg, gen_sorted);

  MetricsSummary s;
  for (std::size_t i = 0; i < gt_labels.size(); ++i) s.confusion.add(classify_pair(gt_labels[i], gen_labels[i], config.match_mode));
  const auto div = diversity(gen_labels, config.diversity_mode, kg, gt_labels);
  s.sensitivity = sensitivity(s.confusion);
  s.diversity = div.value;
  s.ds = ds(s.sensitivity, s.diversity);
  s.dor = dor(s.confusion, config.haldane);
  s.generated_disease_types = div.types;
  s.diversity_denominator_mode = config.diversity_mode;
  s.match_mode = config.match_mode;
  s.haldane = config.haldane;
  s.diversity_numerator = div.numerator;
  s.diversity_denominator = div.denominator;
  return s;
}

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

std::string summary_to_json(const MetricsSummary& s) {
  using ojson = nlohmann::ordered_json;
  ojson doc = ojson::object();
  doc["confusion"] = {{"tp", s.confusion.tp}, {"fp", s.confusion.fp}, {"tn", s.confusion.tn}, {"fn", s.confusion.fn}};
  doc["dor"] = s.dor.infinite ? ojson("inf") : ojson(round4(s.dor.value.value()));
  doc["ds"] = round4(s.ds.value());
  doc["sensitivity"] = round4(s.sensitivity.value());
  doc["diversity"] = round4(s.diversity.value());
  doc["exact"] = {{"dor", s.dor.infinite ? std::string("inf") : s.dor.value.str()},
                  {"ds", s.ds.str()},
                  {"sensitivity", s.sensitivity.str()},
                  {"diversity", s.diversity.str()}};
  doc["diversity_denominator_mode"] = std::string(to_string(s.diversity_denominator_mode));
  doc["diversity_numerator"] = s.diversity_numerator;
  doc["diversity_denominator"] = s.diversity_denominator;
  doc["match_mode"] = std::string(to_string(s.match_mode));
  doc["haldane"] = s.haldane;
  doc["generated_disease_types"] = ojson::array();
  for (const auto& p : s.generated_disease_types) doc["generated_disease_types"].push_back(p.str());
  return doc.dump(2) + "\n";
}

std::string summary_table(const MetricsSummary& s, std::string_view row_name) {
  const std::size_t name_width = std::max<std::size_t>(row_name.size(), 6);
  auto cell = [](const std::string& v) { return std::string(v.size() < 8 ? 8 - v.size() : 0, ' ') + v; };
  std::ostringstream out;
  out << "Method" << std::string(name_width - 6, ' ') << cell("DOR") << cell("DS") << cell("Sen.") << cell("Div.")
      << "\n";
  out << row_name << std::string(name_width - row_name.size(), ' ') << cell(s.dor.render()) << cell(s.ds.fixed4())
      << cell(s.sensitivity.fixed4()) << cell(s.diversity.fixed4()) << "\n";
  out << "TP " << s.confusion.tp << "  FP " << s.confusion.fp << "  TN " << s.confusion.tn << "  FN "
      << s.confusion.fn << "  (diversity " << s.diversity_numerator << "/" << s.diversity_denominator << ", "
      << to_string(s.diversity_denominator_mode) << ")\n";
  return out.str();
}

double bleu_n(std::span<const ReportRecord> generated, std::span<const ReportRecord> gt, int n) {
  if (n < 1 || n > 4) throw Error("BLEU order must be between 1 and 4");
  const auto aligned = align_by_id(gt, generated);

  std::vector<std::size_t> matches(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> totals(static_cast<std::size_t>(n), 0);
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto ref = tokenize(gt[i].text);
    const auto hyp = tokenize(generated[aligned[i]].text);
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (std::size_t order = 1; order <= static_cast<std::size_t>(n); ++order) {
      std::map<std::vector<std::string>, std::size_t> ref_counts;
      for (std::size_t j = 0; j + order <= ref.size(); ++j) ++ref_counts[{ref.begin() + j, ref.begin() + j + order}];
      std::map<std::vector<std::string>, std::size_t> hyp_counts;
      for (std::size_t j = 0; j + order <= hyp.size(); ++j) ++hyp_counts[{hyp.begin() + j, hyp.begin() + j + order}];
      for (const auto& [gram, count] : hyp_counts) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matches[order - 1] += std::min(count, it->second);
        totals[order - 1] += count;
      }
    }
  }
  if (hyp_len == 0 || matches[0] == 0) return 0.0;

  double log_sum = 0.0;
  for (std::size_t k = 0; k < matches.size(); ++k) {
    const double m = static_cast<double>(matches[k]) + (k > 0 ? 1.0 : 0.0);
    const double t = static_cast<double>(totals[k]) + (k > 0 ? 1.0 : 0.0);
    log_sum += std::log(m / t);
  }
  const double bp = hyp_len > ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return bp * std::exp(log_sum / n);
}

}  // namespace cxrkg
