#include "cxrkg/label.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace cxrkg {
namespace {

std::atomic<unsigned> g_default_threads{1};

struct Occurrence {
  std::size_t start;
  std::size_t length;
  std::size_t group;
};

bool contains_phrase(const Tokens& haystack, const Tokens& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace

SentenceLabel::SentenceLabel(std::vector<DiseasePair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

std::string SentenceLabel::render() const {
  if (pairs_.empty()) return std::string(kNormalCategory);
  std::string out;
  for (const auto& p : pairs_) {
    if (!out.empty()) out.push_back('-');
    out += p.str();
  }
  return out;
}

std::string_view to_string(ReportClass c) {
  return c == ReportClass::disease_free ? "disease-free" : "disease-specific";
}

ReportClass parse_report_class(std::string_view s) {
  if (s == "disease-free") return ReportClass::disease_free;
  if (s == "disease-specific") return ReportClass::disease_specific;
  throw FormatError("unknown report class '" + std::string(s) + "'");
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& span : sentence_spans(text)) {
    out.push_back(collapse_whitespace(text.substr(span.begin, span.end - span.begin)));
  }
  return out;
}

SentenceLabel label_sentence(const KnowledgeGraph& kg, std::string_view sentence) {
  const Tokens tokens = kg.canonicalize(tokenize(sentence));
  const auto& groups = kg.trigger_groups();

  std::vector<Occurrence> found;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& phrase = groups[g].tokens;
    if (phrase.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
      if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        found.push_back({i, phrase.size(), g});
      }
    }
  }

  // Longest first; a shorter hit lying strictly inside an accepted longer
  // hit is dropped ("opacity" inside "nodular opacity").
  std::stable_sort(found.begin(), found.end(),
                   [](const Occurrence& a, const Occurrence& b) { return a.length > b.length; });
  std::vector<Occurrence> accepted;
  for (const auto& occ : found) {
    const bool shadowed = std::any_of(accepted.begin(), accepted.end(), [&](const Occurrence& a) {
      return a.length > occ.length && a.start <= occ.start && occ.start + occ.length <= a.start + a.length;
    });
    if (!shadowed) accepted.push_back(occ);
  }

  std::vector<DiseasePair> pairs;
  auto fire = [&](std::size_t e) {
    const auto& entry = kg.entries()[e];
    pairs.push_back({entry.disease, entry.organ});
  };
  for (const auto& occ : accepted) {
    const auto& group = groups[occ.group];
    if (!group.generic()) {
      fire(group.entries.front());
      continue;
    }
    bool cued = false;
    for (const auto e : group.entries) {
      const auto& cues = kg.entries()[e].organ_cues;
      const bool present = std::any_of(cues.begin(), cues.end(),
                                       [&](const std::string& cue) { return contains_phrase(tokens, tokenize(cue)); });
      if (present) {
        fire(e);
        cued = true;
      }
    }
    if (cued) continue;
    for (const auto e : group.entries) {
      if (kg.entries()[e].default_organ) {
        fire(e);
        break;
      }
    }
  }
  return SentenceLabel(std::move(pairs));
}

LabeledReport label_report(const KnowledgeGraph& kg, const ReportRecord& record) {
  LabeledReport out;
  out.record = record;
  out.sentences = split_sentences(record.text);
  out.sentence_labels.reserve(out.sentences.size());
  for (const auto& s : out.sentences) {
    out.sentence_labels.push_back(label_sentence(kg, s));
    for (const auto& p : out.sentence_labels.back().pairs()) out.disease_set.insert(p);
  }
  out.report_class = out.disease_set.empty() ? ReportClass::disease_free : ReportClass::disease_specific;
  return out;
}

std::vector<LabeledReport> label_reports(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                                         unsigned threads) {
  std::vector<LabeledReport> out(records.size());
  if (threads == 0) threads = default_threads();
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), records.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = label_report(kg, records[i]);
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < records.size(); i += workers) out[i] = label_report(kg, records[i]);
      });
    }
  }
  return out;
}

void set_default_threads(unsigned n) { g_default_threads = n == 0 ? 1 : n; }

unsigned default_threads() { return g_default_threads; }

}  // namespace cxrkg
