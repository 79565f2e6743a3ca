#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cxrkg/error.hpp"
#include "cxrkg/text.hpp"

namespace cxrkg {

inline constexpr std::string_view kNormalCategory = "normal";

// Category names every graph must declare.
inline constexpr std::string_view kRequiredCategories[] = {
    "lung", "heart", "pleural", "mediastinum", "bone", "airspace", "diaphragm", "other", "normal"};

struct KgEntry {
  std::string disease;
  std::string organ;
  std::vector<std::string> triggers;
  // Only consulted when a trigger is shared with other entries.
  std::vector<std::string> organ_cues;
  bool default_organ = false;

  friend bool operator==(const KgEntry&, const KgEntry&) = default;
};

struct Violation {
  std::string subject;
  std::string rule;
  std::string detail;

  std::string str() const;
};

using SynonymTable = std::vector<std::pair<std::string, std::string>>;

// A trigger phrase together with every entry that lists it.
struct TriggerGroup {
  std::string phrase;
  Tokens tokens;
  std::vector<std::size_t> entries;

  bool generic() const { return entries.size() > 1; }
};

// Immutable after construction. Construction does not validate; use
// validate_kg() or load_kg() for that.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(std::string version, std::vector<std::string> categories, SynonymTable synonyms,
                 std::vector<KgEntry> entries);

  const std::string& version() const { return version_; }
  const std::vector<std::string>& categories() const { return categories_; }
  // Declaration order; ties in canonicalize() go to the earlier entry.
  const SynonymTable& synonyms() const { return synonyms_; }
  const std::vector<KgEntry>& entries() const { return entries_; }
  const std::vector<TriggerGroup>& trigger_groups() const { return groups_; }

  bool has_category(std::string_view name) const;

  // Single left-to-right pass; at each position the longest synonym phrase
  // wins, ties to the earliest declared. Idempotent on validated graphs.
  Tokens canonicalize(const Tokens& tokens) const;

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.version_ == b.version_ && a.categories_ == b.categories_ &&
           a.synonyms_ == b.synonyms_ && a.entries_ == b.entries_;
  }

 private:
  std::string version_;
  std::vector<std::string> categories_;
  SynonymTable synonyms_;
  std::vector<KgEntry> entries_;

  std::vector<Tokens> synonym_keys_;
  std::vector<Tokens> synonym_values_;
  std::unordered_map<std::string, std::vector<std::size_t>> synonyms_by_head_;
  std::vector<TriggerGroup> groups_;
};

class KgValidationError : public Error {
 public:
  explicit KgValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Parses a graph document, lowercasing and token-normalizing every phrase.
// Throws FormatError on malformed input; performs no invariant checks.
KnowledgeGraph parse_kg(std::string_view json_text);

// parse_kg + validate_kg. Throws KgValidationError listing every violation.
KnowledgeGraph load_kg(const std::filesystem::path& path);

std::string kg_to_json(const KnowledgeGraph& kg);
void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& path);

std::vector<Violation> validate_kg(const KnowledgeGraph& kg);

// Shipped seed graph location (compiled in).
std::filesystem::path seed_kg_path();

}  // namespace cxrkg
