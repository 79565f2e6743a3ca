#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cxrkg/kg.hpp"
#include "cxrkg/record.hpp"

namespace cxrkg::testing {

std::filesystem::path fixture(std::string_view name);
std::string read_fixture(std::string_view name);

// Loaded once from the shipped seed file.
const KnowledgeGraph& seed_kg();

// Two "opacity" entries: lung (default, cue "lung") and diaphragm (cue "diaphragm").
KnowledgeGraph toy_opacity_kg();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

ReportRecord record(std::string id, std::string text, Split split = Split::train);

// Sentences with known labels under the seed graph.
struct BankSentence {
  std::string text;
  std::string label;  // rendered label, "normal" for none
};
const std::vector<BankSentence>& normal_sentences();
const std::vector<BankSentence>& disease_sentences();

// Report of 1..max_sentences sentences; disease sentences appear with
// probability p_disease per sentence.
std::string random_report(std::mt19937& rng, double p_disease, int max_sentences = 4);

}  // namespace cxrkg::testing
