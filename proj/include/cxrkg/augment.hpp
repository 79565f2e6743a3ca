#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cxrkg/corpus.hpp"
#include "cxrkg/kg.hpp"
#include "cxrkg/label.hpp"

namespace cxrkg {

inline constexpr std::size_t kDefaultMinCount = 5;
inline constexpr std::size_t kDefaultMaxCount = 100;

// Sentence label rendering -> distinct sentence formats seen under it.
class SentencePool {
 public:
  struct Bucket {
    std::string key;
    SentenceLabel label;
    // First-appearance order.
    std::vector<std::string> formats;
  };

  // Normal labels are ignored. Returns true if the format was new.
  bool insert(const SentenceLabel& label, std::string_view sentence);

  const std::vector<Bucket>& buckets() const { return buckets_; }
  const Bucket* find(std::string_view key) const;
  std::size_t label_count(std::string_view key) const;
  bool empty() const { return buckets_.empty(); }

  // Lowercased, whitespace-collapsed form used to decide format identity.
  static std::string format_key(std::string_view sentence);

 private:
  std::vector<Bucket> buckets_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::unordered_set<std::string>> seen_;
};

SentencePool build_sentence_pool(const KnowledgeGraph& kg, std::span<const ReportRecord> records);
SentencePool build_sentence_pool(std::span<const LabeledReport> reports);

// Keys with min_count <= label_count <= max_count, ascending by label_count
// then by key.
std::vector<std::string> eligible_buckets(const SentencePool& pool, std::size_t min_count = kDefaultMinCount,
                                          std::size_t max_count = kDefaultMaxCount);

// Optional cap on the variants kept from one round; the kept subset is drawn
// uniformly with a seeded generator and keeps emission order.
struct RoundSampling {
  std::size_t cap = 0;  // 0 keeps everything
  std::uint64_t seed = 0;
};

// For every train report and every sentence in it labeled `bucket_key`,
// emits one variant per alternate format in the bucket (k - 1 per
// occurrence). Variant ids are "<source id>#aug<n>", skipping ids already
// present in `records`. Buckets with fewer than two formats emit nothing.
std::vector<ReportRecord> augment_round(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                                        const SentencePool& pool, std::string_view bucket_key,
                                        const RoundSampling& sampling = {});

struct AugmentConfig {
  std::size_t min_count = kDefaultMinCount;
  std::size_t max_count = kDefaultMaxCount;
  std::optional<std::size_t> max_rounds;
  std::size_t sample_cap = 0;
  // Required when sample_cap > 0.
  std::optional<std::uint64_t> seed;
};

struct AugmentationRound {
  std::string bucket_key;
  std::size_t source_occurrences = 0;  // n
  std::size_t formats = 0;             // k
  std::size_t candidates = 0;          // n * (k - 1)
  std::size_t emitted = 0;             // == candidates unless capped
  // Diseases first marked augmented by this round.
  std::vector<DiseasePair> covered;
};

struct AugmentationReport {
  std::vector<AugmentationRound> rounds;
  std::set<DiseasePair> diseases_covered;
  // Train-split sentence-level occurrence counts.
  DiseaseCounts counts_before;
  DiseaseCounts counts_after;
};

struct AugmentResult {
  std::vector<ReportRecord> corpus;  // originals followed by synthetics
  AugmentationReport report;
};

AugmentResult run_augmentation(const KnowledgeGraph& kg, std::span<const ReportRecord> records,
                               const AugmentConfig& config = {});

std::string augmentation_report_to_json(const AugmentationReport& report);

}  // namespace cxrkg
