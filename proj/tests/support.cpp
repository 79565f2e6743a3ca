#include "support.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace cxrkg::testing {

std::filesystem::path fixture(std::string_view name) { return std::filesystem::path(CXRKG_FIXTURES) / name; }

std::string read_fixture(std::string_view name) {
  std::ifstream in(fixture(name), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const KnowledgeGraph& seed_kg() {
  static const KnowledgeGraph kg = load_kg(seed_kg_path());
  return kg;
}

KnowledgeGraph toy_opacity_kg() {
  std::vector<std::string> categories(std::begin(kRequiredCategories), std::end(kRequiredCategories));
  std::vector<KgEntry> entries = {
      {"opacity", "lung", {"opacity"}, {"lung"}, true},
      {"opacity", "diaphragm", {"opacity"}, {"diaphragm"}, false},
  };
  return KnowledgeGraph("toy", categories, {}, entries);
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("cxrkg-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

ReportRecord record(std::string id, std::string text, Split split) {
  return ReportRecord{std::move(id), std::move(text), split, std::nullopt};
}

const std::vector<BankSentence>& normal_sentences() {
  static const std::vector<BankSentence> bank = {
      {"The heart is normal in size", "normal"},
      {"The lungs are clear", "normal"},
      {"No acute cardiopulmonary abnormality", "normal"},
      {"The mediastinum is unremarkable", "normal"},
      {"Visualized osseous structures are intact", "normal"},
      {"Pulmonary vasculature is within normal limits", "normal"},
  };
  return bank;
}

const std::vector<BankSentence>& disease_sentences() {
  static const std::vector<BankSentence> bank = {
      {"Cardiomegaly is present", "cardiomegaly-heart"},
      {"Small right pleural effusion", "effusion-pleural"},
      {"There is a left lower lobe consolidation", "consolidation-lung"},
      {"Mild pulmonary edema", "edema-lung"},
      {"Sternotomy wires noted", "sternotomy-other"},
      {"Thoracic scoliosis", "scoliosis-bone"},
      {"Hiatal hernia", "hiatal hernia-mediastinum"},
      {"Patchy opacity in the left lung base", "opacity-lung"},
      {"Opacity at the right hemidiaphragm", "opacity-diaphragm"},
      {"There are low lung volumes with broncho-vascular crowding",
       "bronchovascular crowding-lung-low volume-lung"},
      {"Tube in place", "tube-other"},
      {"Small pneumothorax", "pneumothorax-pleural"},
  };
  return bank;
}

std::string random_report(std::mt19937& rng, double p_disease, int max_sentences) {
  std::uniform_int_distribution<int> count(1, max_sentences);
  std::bernoulli_distribution disease(p_disease);
  const int n = count(rng);
  std::string text;
  for (int i = 0; i < n; ++i) {
    const auto& bank = disease(rng) ? disease_sentences() : normal_sentences();
    std::uniform_int_distribution<std::size_t> pick(0, bank.size() - 1);
    if (!text.empty()) text += " ";
    text += bank[pick(rng)].text + ".";
  }
  return text;
}

}  // namespace cxrkg::testing
