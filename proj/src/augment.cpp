#include "cxrkg/augment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

#include "json.hpp"

#include "cxrkg/error.hpp"

namespace cxrkg {

std::string SentencePool::format_key(std::string_view sentence) { return to_lower(collapse_whitespace(sentence)); }

bool SentencePool::insert(const SentenceLabel& label, std::string_view sentence) {
  if (label.normal()) return false;
  auto key = label.render();
  auto it = index_.find(key);
  if (it == index_.end()) {
    it = index_.emplace(key, buckets_.size()).first;
    buckets_.push_back({std::move(key), label, {}});
    seen_.emplace_back();
  }
  const auto b = it->second;
  if (!seen_[b].insert(format_key(sentence)).second) return false;
  buckets_[b].formats.push_back(collapse_whitespace(sentence));
  return true;
}

const SentencePool::Bucket* SentencePool::find(std::string_view key) const {
  const auto it = index_.find(key);
  return it == index_.end() ? nullptr : &buckets_[it->second];
}

std::size_t SentencePool::label_count(std::string_view key) const {
  const auto* b = find(key);
  return b ? b->formats.size() : 0;
}

SentencePool build_sentence_pool(std::span<const LabeledReport> reports) {
  SentencePool pool;
  for (const auto& report : reports) {
    for (std::size_t i = 0; i < report.sentences.size(); ++i) {
      pool.insert(report.sentence_labels[i], report.sentences[i]);
    }
  }
  return pool;
}

SentencePool build_sentence_pool(const KnowledgeGraph& kg, std::span<const ReportRecord> records) {
  return build_sentence_pool(label_reports(kg, records));
}

std::vector<std::string> eligible_buckets(const SentencePool& pool, std::size_t min_count, std::size_t max_count) {
  if (min_count > max_count) throw Error("min_count must not exceed max_count");
  std::vector<const SentencePool::Bucket*> picked;
  for (const auto& b : pool.buckets()) {
    if (b.formats.size() >= min_count && b.formats.size() <= max_count) picked.push_back(&b);
  }
  std::sort(picked.begin(), picked.end(), [](const auto* a, const auto* b) {
    return std::tuple(a->formats.size(), a->key) < std::tuple(b->formats.size(), b->key);
  });
  std::vector<std::string> keys;
  keys.reserve(picked.size());
  for (const auto* b : picked) keys.push_back(b->key);
  return keys;
}

namespace {

struct Variant {
  std::size_t source;
  std::string text;
};

struct RoundOutput {
  std::size_t occurrences = 0;
  std::vector<Variant> variants;
};

// Uniform draw in [0, bound) from a fully specified engine, so selections
// do not depend on the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (cap == 0 || cap >= n) return idx;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < cap; ++i) {
    const auto j = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

RoundOutput collect_variants(std::span<const ReportRecord> records, std::span<const LabeledReport> labels,
                             const SentencePool::Bucket& bucket) {
  RoundOutput out;
  const auto k = bucket.formats.size();
  if (k < 2) return out;
  std::vector<std::string> keys;
  keys.reserve(k);
  for (const auto& f : bucket.formats) keys.push_back(SentencePool::format_key(f));

  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.split != Split::train) continue;
    const auto& labeled = labels[r];
    const auto spans = sentence_spans(record.text);
    for (std::size_t s = 0; s < labeled.sentence_labels.size(); ++s) {
      if (labeled.sentence_labels[s].render() != bucket.key) continue;
      ++out.occurrences;
      const auto current = SentencePool::format_key(labeled.sentences[s]);
      std::vector<std::size_t> alternates;
      for (std::size_t f = 0; f < k; ++f) {
        if (keys[f] != current) alternates.push_back(f);
      }
      // A sentence absent from the pool still gets exactly k - 1 variants.
      if (alternates.size() == k) alternates.pop_back();
      for (const auto f : alternates) {
        std::string text = record.text;
        text.replace(spans[s].begin, spans[s].end - spans[s].begin, bucket.formats[f]);
        out.variants.push_back({r, std::move(text)});
      }
    }
  }
  return out;
}

std::vector<ReportRecord> materialize(std::span<const ReportRecord> records, std::vector<Variant> variants,
                                      const std::vector<std::size_t>& keep) {
  std::unordered_set<std::string> taken;
  for (const auto& r : records) taken.insert(r.id);
  std::map<std::size_t, std::size_t> next_seq;

  std::vector<ReportRecord> out;
  out.reserve(keep.size());
  for (const auto i : keep) {
    auto& v = variants[i];
    const auto& source = records[v.source];
    auto& seq = next_seq[v.source];
    std::string id;
    do {
      id = source.id + "#aug" + std::to_string(++seq);
    } while (taken.contains(id));
    taken.insert(id);
    out.push_back({std::move(id), std::move(v.text), Split::train, source.images});
  }
  return out;
}

std::uint64_t round_seed(std::uint64_t seed, std::size_t round) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(round) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DiseaseCounts train_counts(std::span<const LabeledReport> labels) {
  DiseaseCounts counts;
  for (const auto& l : labels) {
    if (l.record.split != Split::train) continue;
    for (const auto& sl : l.sentence_labels) {
      for (const auto& p : sl.pairs()) ++counts[p];
    }
  }
  return counts;
}

}  // namespace

std::vector<ReportRecord> augment_round(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                                        const SentencePool& pool, std::string_view bucket_key,
                                        const RoundSampling& sampling) {
  const auto* bucket = pool.find(bucket_key);
  if (bucket == nullptr) throw Error("bucket '" + std::string(bucket_key) + "' is not in the sentence pool");
  if (bucket->formats.size() < 2) return {};
  const auto labels = label_reports(kg, records);
  auto round = collect_variants(records, labels, *bucket);
  const auto keep = sample_indices(round.variants.size(), sampling.cap, sampling.seed);
  return materialize(records, std::move(round.variants), keep);
}

AugmentResult run_augmentation(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                               const AugmentConfig& config) {
  if (config.sample_cap > 0 && !config.seed) throw Error("a seed is required when sample_cap is set");
  if (config.min_count > config.max_count) throw Error("min_count must not exceed max_count");

  AugmentResult result;
  result.corpus.assign(records.begin(), records.end());
  auto labels = label_reports(kg, records);

  std::vector<LabeledReport> train;
  for (const auto& l : labels) {
    if (l.record.split == Split::train) train.push_back(l);
  }
  const auto pool = build_sentence_pool(train);
  const auto eligible = eligible_buckets(pool, config.min_count, config.max_count);

  auto& report = result.report;
  report.counts_before = train_counts(labels);
  auto counts = report.counts_before;
  std::set<std::string> processed;

  while (!config.max_rounds || report.rounds.size() < *config.max_rounds) {
    const SentencePool::Bucket* next = nullptr;
    std::tuple<std::size_t, std::size_t, std::string> best_priority;
    for (const auto& key : eligible) {
      if (processed.contains(key)) continue;
      const auto* bucket = pool.find(key);
      const auto& pairs = bucket->label.pairs();
      const bool all_covered = std::all_of(pairs.begin(), pairs.end(),
                                           [&](const DiseasePair& p) { return report.diseases_covered.contains(p); });
      if (all_covered) continue;
      std::size_t scarcity = std::numeric_limits<std::size_t>::max();
      for (const auto& p : pairs) {
        const auto it = counts.find(p);
        scarcity = std::min(scarcity, it == counts.end() ? 0 : it->second);
      }
      auto priority = std::tuple(scarcity, bucket->formats.size(), key);
      if (next == nullptr || priority < best_priority) {
        next = bucket;
        best_priority = std::move(priority);
      }
    }
    if (next == nullptr) break;

    auto round = collect_variants(result.corpus, labels, *next);
    AugmentationRound log;
    log.bucket_key = next->key;
    log.source_occurrences = round.occurrences;
    log.formats = next->formats.size();
    log.candidates = round.variants.size();
    const auto keep = sample_indices(round.variants.size(), config.sample_cap,
                                     round_seed(config.seed.value_or(0), report.rounds.size()));
    auto synthetic = materialize(result.corpus, std::move(round.variants), keep);
    log.emitted = synthetic.size();

    for (auto& s : synthetic) {
      labels.push_back(label_report(kg, s));
      result.corpus.push_back(std::move(s));
    }
    counts = train_counts(labels);

    processed.insert(next->key);
    for (const auto& p : next->label.pairs()) {
      if (report.diseases_covered.insert(p).second) log.covered.push_back(p);
    }
    report.rounds.push_back(std::move(log));
  }
  report.counts_after = std::move(counts);
  return result;
}

namespace {

nlohmann::ordered_json counts_json(const DiseaseCounts& counts) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [pair, count] : counts) {
    arr.push_back({{"disease", pair.disease}, {"organ", pair.organ}, {"count", count}});
  }
  return arr;
}

}  // namespace

std::string augmentation_report_to_json(const AugmentationReport& report) {
  using ojson = nlohmann::ordered_json;
  ojson doc = ojson::object();
  doc["rounds"] = ojson::array();
  for (const auto& r : report.rounds) {
    ojson covered = ojson::array();
    for (const auto& p : r.covered) covered.push_back(p.str());
    doc["rounds"].push_back({{"bucket_key", r.bucket_key},
                             {"source_occurrences", r.source_occurrences},
                             {"formats", r.formats},
                             {"candidates", r.candidates},
                             {"emitted", r.emitted},
                             {"covered", covered}});
  }
  doc["diseases_covered"] = ojson::array();
  for (const auto& p : report.diseases_covered) doc["diseases_covered"].push_back({{"disease", p.disease}, {"organ", p.organ}});
  doc["counts_before"] = counts_json(report.counts_before);
  doc["counts_after"] = counts_json(report.counts_after);
  return doc.dump(2) + "\n";
}

}  // namespace cxrkg
