#include "cxrkg/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "cxrkg/error.hpp"
#include "cxrkg/io.hpp"

namespace cxrkg {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::validation:
      return "validation";
    case Split::test:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  throw FormatError("unknown split '" + std::string(s) + "' (expected train|validation|test)");
}

std::vector<ReportRecord> parse_corpus(std::string_view jsonl) {
  std::vector<ReportRecord> records;
  std::unordered_set<std::string> ids;
  for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    const std::string where = "line " + std::to_string(line_no);
    ojson obj;
    try {
      obj = ojson::parse(line);
    } catch (const ojson::parse_error& e) {
      throw FormatError(where + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw FormatError(where + ": expected a JSON object");
    auto field = [&](const char* key) -> std::string {
      const auto it = obj.find(key);
      if (it == obj.end()) throw FormatError(where + ": missing key '" + key + "'");
      if (!it->is_string()) throw FormatError(where + ": '" + key + "' must be a string");
      return it->get<std::string>();
    };
    ReportRecord r;
    r.id = field("id");
    r.text = field("text");
    try {
      r.split = parse_split(field("split"));
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (const auto it = obj.find("images"); it != obj.end()) {
      if (!it->is_array()) throw FormatError(where + ": 'images' must be an array of strings");
      std::vector<std::string> images;
      for (const auto& img : *it) {
        if (!img.is_string()) throw FormatError(where + ": 'images' must be an array of strings");
        images.push_back(img.get<std::string>());
      }
      r.images = std::move(images);
    }
    if (!ids.insert(r.id).second) throw FormatError(where + ": duplicate id '" + r.id + "'");
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<ReportRecord> load_corpus(const std::filesystem::path& path) {
  try {
    return parse_corpus(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string corpus_to_jsonl(std::span<const ReportRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ojson obj = ojson::object();
    obj["id"] = r.id;
    obj["text"] = r.text;
    obj["split"] = std::string(to_string(r.split));
    if (r.images) obj["images"] = *r.images;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

void write_corpus(std::span<const ReportRecord> records, const std::filesystem::path& path) {
  write_file_atomic(path, corpus_to_jsonl(records));
}

void check_unique_ids(std::span<const ReportRecord> records) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> dupes;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) dupes.push_back(r.id);
  }
  if (!dupes.empty()) throw FormatError("duplicate id '" + dupes.front() + "'");
}

bool DiseaseStats::is_common(const DiseasePair& p) const {
  const auto it = disease_counts.find(p);
  return it != disease_counts.end() && it->second >= common_threshold;
}

DiseaseCounts count_diseases(std::span<const LabeledReport> reports) {
  DiseaseCounts counts;
  for (const auto& report : reports) {
    for (const auto& label : report.sentence_labels) {
      for (const auto& p : label.pairs()) ++counts[p];
    }
  }
  return counts;
}

DiseaseStats stats_from_labels(std::span<const LabeledReport> reports, std::size_t common_threshold) {
  if (common_threshold < 1) throw Error("common threshold must be at least 1");
  DiseaseStats stats;
  stats.common_threshold = common_threshold;
  stats.disease_counts = count_diseases(reports);

  std::size_t common_total = 0;
  for (const auto& [pair, count] : stats.disease_counts) {
    stats.total_occurrences += count;
    if (count >= common_threshold) common_total += count;
  }
  for (const auto& report : reports) {
    for (const auto& label : report.sentence_labels) {
      if (label.normal()) {
        ++stats.sentence_class_counts.d_free;
      } else if (std::any_of(label.pairs().begin(), label.pairs().end(),
                             [&](const DiseasePair& p) { return stats.is_common(p); })) {
        ++stats.sentence_class_counts.d_com;
      } else {
        ++stats.sentence_class_counts.d_tail;
      }
    }
  }
  if (stats.total_occurrences > 0) {
    const auto total = static_cast<std::int64_t>(stats.total_occurrences);
    stats.common_share = Ratio(static_cast<std::int64_t>(common_total), total);
    stats.tail_share = Ratio(total - static_cast<std::int64_t>(common_total), total);
  }
  return stats;
}

DiseaseStats corpus_stats(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                          std::size_t common_threshold) {
  const auto labeled = label_reports(kg, records);
  return stats_from_labels(labeled, common_threshold);
}

namespace {

std::vector<std::pair<DiseasePair, std::size_t>> by_descending_count(const DiseaseCounts& counts) {
  std::vector<std::pair<DiseasePair, std::size_t>> rows(counts.begin(), counts.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return rows;
}

ojson share_json(const Ratio& r) { return r.defined() ? ojson(r.value()) : ojson(nullptr); }

}  // namespace

std::string stats_to_json(const DiseaseStats& stats) {
  ojson doc = ojson::object();
  doc["common_threshold"] = stats.common_threshold;
  doc["total_occurrences"] = stats.total_occurrences;
  doc["sentence_class_counts"] = {{"d_free", stats.sentence_class_counts.d_free},
                                  {"d_com", stats.sentence_class_counts.d_com},
                                  {"d_tail", stats.sentence_class_counts.d_tail}};
  doc["common_share"] = share_json(stats.common_share);
  doc["tail_share"] = share_json(stats.tail_share);
  doc["common_share_exact"] = stats.common_share.str();
  doc["tail_share_exact"] = stats.tail_share.str();
  doc["disease_counts"] = ojson::array();
  for (const auto& [pair, count] : by_descending_count(stats.disease_counts)) {
    doc["disease_counts"].push_back({{"disease", pair.disease},
                                     {"organ", pair.organ},
                                     {"count", count},
                                     {"common", count >= stats.common_threshold}});
  }
  return doc.dump(2) + "\n";
}

std::string render_histogram(const DiseaseStats& stats, std::size_t bar_width) {
  const auto rows = by_descending_count(stats.disease_counts);
  std::size_t label_width = 0;
  std::size_t max_count = 0;
  for (const auto& [pair, count] : rows) {
    label_width = std::max(label_width, pair.str().size());
    max_count = std::max(max_count, count);
  }
  std::ostringstream out;
  const auto& sc = stats.sentence_class_counts;
  out << "sentences: d_free " << sc.d_free << ", d_com " << sc.d_com << ", d_tail " << sc.d_tail << "\n";
  out << "common (>= " << stats.common_threshold << ") share " << stats.common_share.fixed4() << ", tail share "
      << stats.tail_share.fixed4() << "\n";
  for (const auto& [pair, count] : rows) {
    const auto label = pair.str();
    std::size_t len = max_count == 0 ? 0 : (count * bar_width + max_count - 1) / max_count;
    out << label << std::string(label_width - label.size(), ' ') << " | " << std::string(len, '#') << " "
        << count << (count >= stats.common_threshold ? "" : "  (tail)") << "\n";
  }
  return out.str();
}

Partition partition_by_class(const KnowledgeGraph& kg, std::span<const ReportRecord> records) {
  Partition out;
  const auto labeled = label_reports(kg, records);
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& side = labeled[i].report_class == ReportClass::disease_free ? out.disease_free : out.disease_specific;
    side.push_back(records[i]);
  }
  return out;
}

}  // namespace cxrkg
