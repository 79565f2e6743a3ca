#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "cxrkg/pipeline.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cxrkg;
using testing::record;
using testing::seed_kg;

namespace {

constexpr const char* kNormalText = "The heart is normal in size. The lungs are clear.";

std::vector<ReportRecord> random_corpus(std::mt19937& rng, std::size_t n, double p, const std::string& prefix = "r") {
  std::vector<ReportRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(record(prefix + std::to_string(i), testing::random_report(rng, p)));
  return out;
}

std::vector<ReportRecord> constant(std::span<const ReportRecord> like, const std::string& text) {
  std::vector<ReportRecord> out;
  for (const auto& r : like) out.push_back(record(r.id, text));
  return out;
}

std::size_t free_count(std::span<const ReportRecord> gt) {
  std::size_t n = 0;
  for (const auto& r : gt) n += label_report(seed_kg(), r).disease_set.empty() ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("oracle classifier") {
  const auto& kg = seed_kg();
  std::mt19937 rng(2);
  const auto gt = random_corpus(rng, 50, 0.4);
  const auto exact = oracle_classifier(kg, gt, 0.0, 1);
  const auto inverted = oracle_classifier(kg, gt, 1.0, 1);
  REQUIRE(exact.size() == gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    CHECK(exact[i].id == gt[i].id);
    CHECK(exact[i].decision == label_report(kg, gt[i]).report_class);
    CHECK(inverted[i].decision != exact[i].decision);
  }
  CHECK_THROWS(oracle_classifier(kg, gt, 1.5, 1));
  CHECK_THROWS(oracle_classifier(kg, gt, -0.1, 1));
  CHECK(oracle_classifier(kg, gt, 0.3, 9) == oracle_classifier(kg, gt, 0.3, 9));
}

TEST_CASE("flip rate is honoured in expectation") {
  const auto& kg = seed_kg();
  std::vector<ReportRecord> gt;
  for (int i = 0; i < 10000; ++i) gt.push_back(record("c" + std::to_string(i), i % 3 ? "Small pneumothorax." : kNormalText));
  const auto exact = oracle_classifier(kg, gt, 0.0, 0);
  const auto noisy = oracle_classifier(kg, gt, 0.3, 2024);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) flips += exact[i].decision != noisy[i].decision ? 1 : 0;
  const double rate = static_cast<double>(flips) / static_cast<double>(gt.size());
  CHECK(std::abs(rate - 0.3) <= 0.02);
}

TEST_CASE("route") {
  const std::vector<ReportRecord> free = {record("a", "free a"), record("b", "free b"), record("c", "free c"),
                                          record("d", "free d")};
  const std::vector<ReportRecord> spec = {record("d", "spec d"), record("c", "spec c"), record("b", "spec b"),
                                          record("a", "spec a")};
  SUBCASE("all free") {
    const Decisions ds = {{"a", ReportClass::disease_free}, {"b", ReportClass::disease_free}};
    const std::vector<ReportRecord> f2(free.begin(), free.begin() + 2);
    const std::vector<ReportRecord> s2 = {spec[3], spec[2]};
    const auto r = route(ds, f2, s2);
    CHECK(r.corpus == f2);
  }
  SUBCASE("mixed") {
    const Decisions ds = {{"c", ReportClass::disease_specific},
                          {"a", ReportClass::disease_free},
                          {"d", ReportClass::disease_free},
                          {"b", ReportClass::disease_specific}};
    const auto r = route(ds, free, spec);
    REQUIRE(r.corpus.size() == 4);
    CHECK(r.corpus[0].text == "spec c");
    CHECK(r.corpus[1].text == "free a");
    CHECK(r.corpus[2].text == "free d");
    CHECK(r.corpus[3].text == "spec b");
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(r.log[i].id == ds[i].id);
      CHECK(r.log[i].source == ds[i].decision);
      CHECK(r.log[i].chosen_output == r.corpus[i].text);
    }
    const auto log = routing_log_to_jsonl(r.log);
    CHECK(log.find("\"source\":\"disease-specific-generator\"") != std::string::npos);
  }
  SUBCASE("id mismatch") {
    const Decisions ds = {{"a", ReportClass::disease_free}, {"z", ReportClass::disease_free}};
    CHECK_THROWS_AS(route(ds, free, spec), IdMismatchError);
  }
  SUBCASE("duplicate decision") {
    const Decisions ds = {{"a", ReportClass::disease_free}, {"a", ReportClass::disease_free}};
    CHECK_THROWS_AS(route(ds, free, spec), FormatError);
  }
}

TEST_CASE("decisions round trip") {
  const Decisions ds = {{"x", ReportClass::disease_specific}, {"y", ReportClass::disease_free}};
  CHECK(parse_decisions(decisions_to_jsonl(ds)) == ds);
  CHECK_THROWS_AS(parse_decisions(R"({"id":"x","decision":"sick"})"), FormatError);
  CHECK_THROWS_AS(parse_decisions(R"({"decision":"disease-free"})"), FormatError);
}

TEST_CASE("perfect routing with ground-truth specifics") {
  const auto& kg = seed_kg();
  std::mt19937 rng(77);
  const auto gt = random_corpus(rng, 80, 0.4);
  const auto decisions = oracle_classifier(kg, gt, 0.0, 5);
  const auto s = evaluate_pipeline(kg, gt, decisions, constant(gt, kNormalText), gt);
  CHECK(s.sensitivity == Ratio(1, 1));
  CHECK(s.confusion.fp == 0);
  CHECK(s.confusion.tn == free_count(gt));
}

TEST_CASE("specific-only routing has no true negatives") {
  const auto& kg = seed_kg();
  std::mt19937 rng(78);
  const auto gt = random_corpus(rng, 40, 0.4);
  Decisions all_specific;
  for (const auto& r : gt) all_specific.push_back({r.id, ReportClass::disease_specific});
  const auto s = evaluate_pipeline(kg, gt, all_specific, constant(gt, kNormalText),
                                   constant(gt, "Cardiomegaly is present."));
  CHECK(s.confusion.tn == 0);
  CHECK(s.dor == DorValue{false, Ratio(0, 1)});
}

TEST_CASE("evaluate_pipeline equals evaluate after route") {
  const auto& kg = seed_kg();
  std::mt19937 rng(500);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = rng() % 25;
    const auto gt = random_corpus(rng, n, 0.4);
    auto free = constant(gt, kNormalText);
    for (std::size_t i = 0; i < n; i += 3) free[i].text = testing::random_report(rng, 0.2);
    auto spec = random_corpus(rng, n, 0.7);
    std::shuffle(spec.begin(), spec.end(), rng);
    const double flip = static_cast<double>(rng() % 6) / 10.0;
    const auto decisions = oracle_classifier(kg, gt, flip, rng());
    EvalConfig cfg;
    cfg.haldane = iter % 2 == 0;
    cfg.match_mode = iter % 3 == 0 ? MatchMode::keyword : MatchMode::pair;
    const auto composed = evaluate(kg, gt, route(decisions, free, spec).corpus, cfg);
    CHECK(evaluate_pipeline(kg, gt, decisions, free, spec, cfg) == composed);
    CHECK(summary_to_json(evaluate_pipeline(kg, gt, decisions, free, spec, cfg)) == summary_to_json(composed));
  }
}
