#include "cxrkg/kg.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

#include "cxrkg/io.hpp"

namespace cxrkg {

using ojson = nlohmann::ordered_json;

std::string Violation::str() const {
  std::string s = subject + ": " + rule;
  if (!detail.empty()) s += " (" + detail + ")";
  return s;
}

KgValidationError::KgValidationError(std::vector<Violation> violations)
    : Error([&] {
        std::string msg = std::to_string(violations.size()) + " knowledge graph violation(s)";
        for (const auto& v : violations) msg += "\n  " + v.str();
        return msg;
      }()),
      violations_(std::move(violations)) {}

KnowledgeGraph::KnowledgeGraph(std::string version, std::vector<std::string> categories,
                               SynonymTable synonyms, std::vector<KgEntry> entries)
    : version_(std::move(version)),
      categories_(std::move(categories)),
      synonyms_(std::move(synonyms)),
      entries_(std::move(entries)) {
  for (std::size_t i = 0; i < synonyms_.size(); ++i) {
    synonym_keys_.push_back(tokenize(synonyms_[i].first));
    synonym_values_.push_back(tokenize(synonyms_[i].second));
    if (!synonym_keys_.back().empty()) synonyms_by_head_[synonym_keys_.back().front()].push_back(i);
  }

  std::map<std::string, std::size_t> group_of;
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    for (const auto& trigger : entries_[e].triggers) {
      auto tokens = tokenize(trigger);
      if (tokens.empty()) continue;
      const auto phrase = join(tokens);
      auto [it, inserted] = group_of.emplace(phrase, groups_.size());
      if (inserted) groups_.push_back({phrase, std::move(tokens), {}});
      auto& members = groups_[it->second].entries;
      if (members.empty() || members.back() != e) members.push_back(e);
    }
  }
}

bool KnowledgeGraph::has_category(std::string_view name) const {
  return std::find(categories_.begin(), categories_.end(), name) != categories_.end();
}

Tokens KnowledgeGraph::canonicalize(const Tokens& tokens) const {
  Tokens out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    const auto head = synonyms_by_head_.find(tokens[i]);
    std::size_t best = synonyms_.size();
    std::size_t best_len = 0;
    if (head != synonyms_by_head_.end()) {
      for (const auto s : head->second) {
        const auto& key = synonym_keys_[s];
        if (key.size() <= best_len || i + key.size() > tokens.size()) continue;
        if (std::equal(key.begin(), key.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
          best = s;
          best_len = key.size();
        }
      }
    }
    if (best_len == 0) {
      out.push_back(tokens[i]);
      ++i;
    } else {
      const auto& value = synonym_values_[best];
      out.insert(out.end(), value.begin(), value.end());
      i += best_len;
    }
  }
  return out;
}

namespace {

std::string normalize_phrase(const std::string& s) { return join(tokenize(s)); }

std::string normalize_name(std::string_view s) { return collapse_whitespace(to_lower(s)); }

const ojson& require(const ojson& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing key '" + key + "'");
  return *it;
}

std::string as_string(const ojson& v, const std::string& where) {
  if (!v.is_string()) throw FormatError(where + ": expected a string");
  return v.get<std::string>();
}

std::vector<std::string> as_string_list(const ojson& v, const std::string& where) {
  if (!v.is_array()) throw FormatError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_string(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string entry_subject(std::size_t i, const KgEntry& e) {
  return "entry[" + std::to_string(i) + "] (" + e.disease + ", " + e.organ + ")";
}

bool is_normalized(const std::string& phrase) { return !phrase.empty() && normalize_phrase(phrase) == phrase; }

// True if `key` can line up against `value` with at least one shared token
// position and agreement on every shared position.
enum class Overlap { none, contained, partial };

Overlap overlap(const Tokens& key, const Tokens& value) {
  const auto k = static_cast<std::ptrdiff_t>(key.size());
  const auto v = static_cast<std::ptrdiff_t>(value.size());
  Overlap found = Overlap::none;
  for (std::ptrdiff_t d = -(k - 1); d < v; ++d) {
    bool agree = true;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, -d); j < k && d + j < v; ++j) {
      if (key[static_cast<std::size_t>(j)] != value[static_cast<std::size_t>(d + j)]) {
        agree = false;
        break;
      }
    }
    if (!agree) continue;
    if (d >= 0 && d + k <= v) return Overlap::contained;
    found = Overlap::partial;
  }
  return found;
}

}  // namespace

KnowledgeGraph parse_kg(std::string_view json_text) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw FormatError(std::string("knowledge graph is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("knowledge graph: top level must be an object");

  std::string version;
  if (const auto it = doc.find("version"); it != doc.end()) {
    version = it->is_string() ? it->get<std::string>() : it->dump();
  }

  std::vector<std::string> categories;
  for (auto& c : as_string_list(require(doc, "categories", "knowledge graph"), "categories")) {
    categories.push_back(normalize_name(c));
  }

  SynonymTable synonyms;
  if (const auto it = doc.find("synonyms"); it != doc.end()) {
    if (!it->is_object()) throw FormatError("synonyms: expected an object");
    for (const auto& [key, value] : it->items()) {
      synonyms.emplace_back(normalize_phrase(key),
                            normalize_phrase(as_string(value, "synonyms." + key)));
    }
  }

  std::vector<KgEntry> entries;
  const auto& raw_entries = require(doc, "entries", "knowledge graph");
  if (!raw_entries.is_array()) throw FormatError("entries: expected an array");
  for (std::size_t i = 0; i < raw_entries.size(); ++i) {
    const auto& raw = raw_entries[i];
    const std::string where = "entries[" + std::to_string(i) + "]";
    if (!raw.is_object()) throw FormatError(where + ": expected an object");
    KgEntry e;
    e.disease = normalize_phrase(as_string(require(raw, "disease", where), where + ".disease"));
    e.organ = normalize_name(as_string(require(raw, "organ", where), where + ".organ"));
    for (auto& t : as_string_list(require(raw, "triggers", where), where + ".triggers")) {
      e.triggers.push_back(normalize_phrase(t));
    }
    if (const auto it = raw.find("organ_cues"); it != raw.end()) {
      for (auto& c : as_string_list(*it, where + ".organ_cues")) e.organ_cues.push_back(normalize_phrase(c));
    }
    if (const auto it = raw.find("default_organ"); it != raw.end()) {
      if (!it->is_boolean()) throw FormatError(where + ".default_organ: expected a boolean");
      e.default_organ = it->get<bool>();
    }
    entries.push_back(std::move(e));
  }

  return KnowledgeGraph(std::move(version), std::move(categories), std::move(synonyms),
                        std::move(entries));
}

KnowledgeGraph load_kg(const std::filesystem::path& path) {
  auto kg = parse_kg(read_file(path));
  auto violations = validate_kg(kg);
  if (!violations.empty()) throw KgValidationError(std::move(violations));
  return kg;
}

std::string kg_to_json(const KnowledgeGraph& kg) {
  ojson doc = ojson::object();
  doc["version"] = kg.version();
  doc["categories"] = kg.categories();
  doc["synonyms"] = ojson::object();
  for (const auto& [key, value] : kg.synonyms()) doc["synonyms"][key] = value;
  doc["entries"] = ojson::array();
  for (const auto& e : kg.entries()) {
    ojson o = ojson::object();
    o["disease"] = e.disease;
    o["organ"] = e.organ;
    o["triggers"] = e.triggers;
    if (!e.organ_cues.empty()) o["organ_cues"] = e.organ_cues;
    if (e.default_organ) o["default_organ"] = true;
    doc["entries"].push_back(std::move(o));
  }
  return doc.dump(2) + "\n";
}

void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& path) {
  write_file_atomic(path, kg_to_json(kg));
}

std::vector<Violation> validate_kg(const KnowledgeGraph& kg) {
  std::vector<Violation> out;

  std::set<std::string> declared;
  for (const auto& c : kg.categories()) {
    if (c.empty() || normalize_name(c) != c) out.push_back({"category \"" + c + "\"", "non-canonical name", ""});
    if (!declared.insert(c).second) out.push_back({"category \"" + c + "\"", "duplicate category", ""});
  }
  for (const auto required : kRequiredCategories) {
    if (!declared.contains(std::string(required))) {
      out.push_back({"category \"" + std::string(required) + "\"", "missing category", ""});
    }
  }

  // Synonyms: keys/values normalized, values fixed points, and no key able
  // to straddle a substituted value (which would break idempotence).
  std::set<std::string> seen_keys;
  for (const auto& [key, value] : kg.synonyms()) {
    const std::string subject = "synonym \"" + key + "\"";
    if (!is_normalized(key)) out.push_back({subject, "non-canonical phrase", "key"});
    if (!is_normalized(value)) out.push_back({subject, "non-canonical phrase", "value \"" + value + "\""});
    if (!seen_keys.insert(key).second) out.push_back({subject, "duplicate synonym", ""});
  }
  for (const auto& [key, value] : kg.synonyms()) {
    const auto value_tokens = tokenize(value);
    for (const auto& [other_key, other_value] : kg.synonyms()) {
      const auto key_tokens = tokenize(other_key);
      if (key_tokens.empty()) continue;
      switch (overlap(key_tokens, value_tokens)) {
        case Overlap::contained:
          out.push_back({"synonym \"" + key + "\"", "synonym value not a fixed point",
                         "value \"" + value + "\" contains key \"" + other_key + "\""});
          break;
        case Overlap::partial:
          out.push_back({"synonym \"" + key + "\"", "synonym overlap",
                         "value \"" + value + "\" can combine with neighbours into key \"" + other_key + "\""});
          break;
        case Overlap::none:
          break;
      }
    }
  }

  std::map<std::pair<std::string, std::string>, std::size_t> pairs;
  for (std::size_t i = 0; i < kg.entries().size(); ++i) {
    const auto& e = kg.entries()[i];
    const auto subject = entry_subject(i, e);
    if (!is_normalized(e.disease)) out.push_back({subject, "non-canonical disease", ""});
    if (e.organ == kNormalCategory) {
      out.push_back({subject, "normal organ", "entries cannot belong to \"normal\""});
    } else if (!declared.contains(e.organ)) {
      out.push_back({subject, "undeclared organ", "\"" + e.organ + "\" is not a declared category"});
    }
    if (auto [it, inserted] = pairs.emplace(std::pair{e.disease, e.organ}, i); !inserted) {
      out.push_back({subject, "duplicate pair", "same (disease, organ) as entry[" + std::to_string(it->second) + "]"});
    }
    if (e.triggers.empty()) out.push_back({subject, "empty triggers", ""});
    for (const auto& t : e.triggers) {
      const auto tokens = tokenize(t);
      if (!is_normalized(t) || kg.canonicalize(tokens) != tokens) {
        out.push_back({subject, "non-canonical trigger", "\"" + t + "\""});
      }
    }
    for (const auto& c : e.organ_cues) {
      const auto tokens = tokenize(c);
      if (!is_normalized(c) || kg.canonicalize(tokens) != tokens) {
        out.push_back({subject, "non-canonical cue", "\"" + c + "\""});
      }
    }
  }

  for (const auto& group : kg.trigger_groups()) {
    if (!group.generic()) continue;
    std::size_t defaults = 0;
    for (const auto e : group.entries) defaults += kg.entries()[e].default_organ ? 1 : 0;
    if (defaults == 1) continue;
    out.push_back({"trigger \"" + group.phrase + "\"", defaults == 0 ? "missing default" : "ambiguous default",
                   std::to_string(group.entries.size()) + " entries share it, " + std::to_string(defaults) +
                       " marked default_organ"});
  }
  return out;
}

std::filesystem::path seed_kg_path() { return CXRKG_SEED_KG; }

}  // namespace cxrkg
