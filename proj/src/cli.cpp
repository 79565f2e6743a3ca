#include "cxrkg/cli.hpp"

#include <map>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cxrkg/augment.hpp"
#include "cxrkg/corpus.hpp"
#include "cxrkg/error.hpp"
#include "cxrkg/io.hpp"
#include "cxrkg/kg.hpp"
#include "cxrkg/label.hpp"
#include "cxrkg/metrics.hpp"
#include "cxrkg/pipeline.hpp"

namespace cxrkg {
namespace {

using ojson = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

constexpr const char* kCorpusFormat =
    "Corpus files: UTF-8, one JSON object per line with keys \"id\" (unique string), \"text\", "
    "\"split\" (train|validation|test) and optional \"images\" (array of strings).";
constexpr const char* kKgFormat =
    "Knowledge graph: JSON object with \"version\", \"categories\" (array), \"synonyms\" (phrase -> "
    "canonical phrase) and \"entries\" (objects with \"disease\", \"organ\", \"triggers\", optional "
    "\"organ_cues\" and \"default_organ\").";
constexpr const char* kDecisionFormat =
    "Decision files: one {\"id\": ..., \"decision\": \"disease-free\"|\"disease-specific\"} object per line.";

// Raw flag values; copied into RunConfig only when the flag was given.
struct Flags {
  std::string config;
  RunConfig run;
  std::string gt, gen, free_outputs, specific_outputs, decisions, decisions_out, log, report, histogram, summary;
  std::size_t max_rounds = 0;
  std::uint64_t seed = 0;
};

struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, CLI::Option*> settings;
};

void add_common(Command& cmd, Flags& f, bool with_input, bool with_output) {
  cmd.app->add_option("--config", f.config, "JSON file with run settings (keys as in RunConfig, snake_case)");
  cmd.settings["kg_path"] = cmd.app->add_option("--kg,--kg-path", f.run.kg_path, "Knowledge graph JSON file");
  cmd.settings["threads"] =
      cmd.app->add_option("--threads", f.run.threads, "Worker threads for labeling (default: all cores)");
  if (with_input) cmd.settings["input"] = cmd.app->add_option("--in,--input", f.run.input, "Input corpus (JSONL)");
  if (with_output) cmd.settings["output"] = cmd.app->add_option("--out,--output", f.run.output, "Output file");
}

template <typename T>
T config_value(const ojson& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const ojson::exception& e) {
    throw FormatError("config key '" + key + "': " + e.what());
  }
}

RunConfig resolve(const Command& cmd, const Flags& f) {
  RunConfig cfg;
  ojson file = ojson::object();
  if (!f.config.empty()) {
    try {
      file = ojson::parse(read_file(f.config));
    } catch (const ojson::parse_error& e) {
      throw FormatError(f.config + ": malformed JSON: " + e.what());
    }
    if (!file.is_object()) throw FormatError(f.config + ": expected a JSON object");
    static const std::set<std::string> known = {
        "kg_path",        "input",     "output",    "common_threshold", "min_count", "max_count",
        "max_rounds",     "sample_cap", "diversity_mode", "match_mode", "haldane",   "flip_rate",
        "seed",           "format",    "threads"};
    for (const auto& [key, value] : file.items()) {
      if (!known.contains(key)) throw FormatError(f.config + ": unknown key '" + key + "'");
    }
  }

  auto pick = [&](const std::string& key, auto& dst, const auto& flag_value) {
    using T = std::decay_t<decltype(dst)>;
    const auto it = cmd.settings.find(key);
    if (it != cmd.settings.end() && it->second->count() > 0) {
      dst = flag_value;
    } else if (file.contains(key)) {
      dst = config_value<T>(file, key);
    }
  };
  pick("kg_path", cfg.kg_path, f.run.kg_path);
  pick("input", cfg.input, f.run.input);
  pick("output", cfg.output, f.run.output);
  pick("common_threshold", cfg.common_threshold, f.run.common_threshold);
  pick("min_count", cfg.min_count, f.run.min_count);
  pick("max_count", cfg.max_count, f.run.max_count);
  pick("sample_cap", cfg.sample_cap, f.run.sample_cap);
  pick("diversity_mode", cfg.diversity_mode, f.run.diversity_mode);
  pick("match_mode", cfg.match_mode, f.run.match_mode);
  pick("haldane", cfg.haldane, f.run.haldane);
  pick("flip_rate", cfg.flip_rate, f.run.flip_rate);
  pick("format", cfg.format, f.run.format);
  pick("threads", cfg.threads, f.run.threads);
  if (const auto it = cmd.settings.find("max_rounds"); it != cmd.settings.end() && it->second->count() > 0) {
    cfg.max_rounds = f.max_rounds;
  } else if (file.contains("max_rounds")) {
    cfg.max_rounds = config_value<std::size_t>(file, "max_rounds");
  }
  if (const auto it = cmd.settings.find("seed"); it != cmd.settings.end() && it->second->count() > 0) {
    cfg.seed = f.seed;
  } else if (file.contains("seed")) {
    cfg.seed = config_value<std::uint64_t>(file, "seed");
  }

  if (cfg.format != "json" && cfg.format != "table") throw UsageError("--format must be json or table");
  if (cfg.common_threshold < 1) throw UsageError("--common-threshold must be at least 1");
  if (cfg.min_count > cfg.max_count) throw UsageError("--min-count must not exceed --max-count");
  if (!(cfg.flip_rate >= 0.0 && cfg.flip_rate <= 1.0)) throw UsageError("--flip-rate must lie in [0, 1]");
  if ((cfg.flip_rate > 0.0 || cfg.sample_cap > 0) && !cfg.seed) {
    throw UsageError("--seed is required when --flip-rate > 0 or --sample-cap is set");
  }
  try {
    parse_diversity_mode(cfg.diversity_mode);
    parse_match_mode(cfg.match_mode);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  set_default_threads(cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads);
  return cfg;
}

const std::string& required(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
  return value;
}

void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty()) {
    out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

KnowledgeGraph kg_for(const RunConfig& cfg) { return load_kg(required(cfg.kg_path, "--kg")); }

EvalConfig eval_config(const RunConfig& cfg) {
  return {parse_diversity_mode(cfg.diversity_mode), parse_match_mode(cfg.match_mode), cfg.haldane};
}

int cmd_validate_kg(const RunConfig& cfg, std::ostream& out) {
  const auto kg = parse_kg(read_file(required(cfg.kg_path, "--kg")));
  const auto violations = validate_kg(kg);
  out << violations.size() << " violations\n";
  for (const auto& v : violations) out << "  " << v.str() << "\n";
  return violations.empty() ? kExitOk : kExitValidation;
}

int cmd_label(const RunConfig& cfg, std::ostream& out) {
  const auto kg = kg_for(cfg);
  const auto records = load_corpus(required(cfg.input, "--in"));
  std::string jsonl;
  for (const auto& l : label_reports(kg, records)) {
    ojson obj = ojson::object();
    obj["id"] = l.record.id;
    obj["report_class"] = std::string(to_string(l.report_class));
    obj["sentences"] = ojson::array();
    for (std::size_t i = 0; i < l.sentences.size(); ++i) {
      obj["sentences"].push_back({{"text", l.sentences[i]}, {"label", l.sentence_labels[i].render()}});
    }
    obj["disease_set"] = ojson::array();
    for (const auto& p : l.disease_set) obj["disease_set"].push_back(p.str());
    jsonl += obj.dump() + "\n";
  }
  emit(cfg.output, jsonl, out);
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, const Flags& f, std::ostream& out) {
  const auto kg = kg_for(cfg);
  const auto records = load_corpus(required(cfg.input, "--in"));
  const auto stats = stats_from_labels(label_reports(kg, records), cfg.common_threshold);
  const auto histogram = render_histogram(stats);
  if (!f.histogram.empty()) write_file_atomic(f.histogram, histogram);
  if (cfg.format == "table") {
    if (!cfg.output.empty()) write_file_atomic(cfg.output, stats_to_json(stats));
    out << histogram;
  } else {
    emit(cfg.output, stats_to_json(stats), out);
  }
  return kExitOk;
}

int cmd_augment(const RunConfig& cfg, const Flags& f, std::ostream& out) {
  const auto kg = kg_for(cfg);
  const auto records = load_corpus(required(cfg.input, "--in"));
  required(cfg.output, "--out");
  AugmentConfig ac;
  ac.min_count = cfg.min_count;
  ac.max_count = cfg.max_count;
  ac.max_rounds = cfg.max_rounds;
  ac.sample_cap = cfg.sample_cap;
  ac.seed = cfg.seed;
  const auto result = run_augmentation(kg, records, ac);
  write_corpus(result.corpus, cfg.output);
  if (!f.report.empty()) write_file_atomic(f.report, augmentation_report_to_json(result.report));
  out << "augmented " << records.size() << " -> " << result.corpus.size() << " reports in "
      << result.report.rounds.size() << " round(s)\n";
  return kExitOk;
}

void print_summary(const RunConfig& cfg, const std::string& json_path, const MetricsSummary& s, std::ostream& out) {
  if (!json_path.empty()) write_file_atomic(json_path, summary_to_json(s));
  if (cfg.format == "table") {
    out << summary_table(s);
  } else if (json_path.empty()) {
    out << summary_to_json(s);
  }
}

int cmd_evaluate(const RunConfig& cfg, const Flags& f, std::ostream& out) {
  const auto kg = kg_for(cfg);
  const auto gt = load_corpus(required(f.gt, "--gt"));
  const auto gen = load_corpus(required(f.gen, "--gen"));
  print_summary(cfg, cfg.output, evaluate(kg, gt, gen, eval_config(cfg)), out);
  return kExitOk;
}

int cmd_route(const RunConfig& cfg, const Flags& f, std::ostream& out) {
  const auto free_outputs = load_corpus(required(f.free_outputs, "--free"));
  const auto specific_outputs = load_corpus(required(f.specific_outputs, "--specific"));
  required(cfg.output, "--out");

  std::optional<KnowledgeGraph> kg;
  std::vector<ReportRecord> gt;
  if (!f.gt.empty()) {
    kg = kg_for(cfg);
    gt = load_corpus(f.gt);
  }
  Decisions decisions;
  if (!f.decisions.empty()) {
    decisions = load_decisions(f.decisions);
  } else if (kg) {
    decisions = oracle_classifier(*kg, gt, cfg.flip_rate, cfg.seed.value_or(0));
  } else {
    throw UsageError("route needs --decisions, or --gt (with --kg) to simulate the classifier");
  }
  if (!f.decisions_out.empty()) write_file_atomic(f.decisions_out, decisions_to_jsonl(decisions));

  const auto routed = route(decisions, free_outputs, specific_outputs);
  write_corpus(routed.corpus, cfg.output);
  if (!f.log.empty()) write_file_atomic(f.log, routing_log_to_jsonl(routed.log));
  if (kg) print_summary(cfg, f.summary, evaluate(*kg, gt, routed.corpus, eval_config(cfg)), out);
  return kExitOk;
}

void add_eval_flags(Command& cmd, Flags& f) {
  cmd.settings["diversity_mode"] = cmd.app->add_option("--diversity-mode", f.run.diversity_mode,
                                                       "Diversity denominator: reference-set (default) | kg-total");
  cmd.settings["match_mode"] =
      cmd.app->add_option("--match-mode", f.run.match_mode, "TP matching: pair (default) | keyword");
  cmd.settings["haldane"] = cmd.app->add_flag("--haldane", f.run.haldane, "Add 0.5 to every cell when one is zero");
  cmd.settings["format"] = cmd.app->add_option("--format", f.run.format, "Standard output format: json | table");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge-graph toolkit for chest X-ray report labeling, augmentation and evaluation", "cxrkg"};
  app.require_subcommand(1);
  app.footer(std::string(kCorpusFormat) + "\n" + kKgFormat + "\n" +
             "Exit status: 0 success, 1 usage error, 2 input-format error, 3 validation failure.");

  Flags f;
  std::map<std::string, Command> commands;
  auto make = [&](const std::string& name, const std::string& description, const std::string& footer) -> Command& {
    auto& cmd = commands[name];
    cmd.app = app.add_subcommand(name, description);
    cmd.app->footer(footer);
    return cmd;
  };

  auto& validate = make("validate-kg", "Check a knowledge graph file and list every violation", kKgFormat);
  add_common(validate, f, false, false);

  auto& label = make("label", "Label every sentence of a corpus; writes one JSON object per report",
                     std::string(kCorpusFormat) + "\nOutput lines: {id, report_class, sentences: [{text, label}], "
                                                  "disease_set}.");
  add_common(label, f, true, true);

  auto& stats = make("stats", "Disease occurrence statistics and sentence classes (d_free/d_com/d_tail)",
                     std::string(kCorpusFormat) + "\nOutput: JSON statistics; --format table prints a histogram.");
  add_common(stats, f, true, true);
  stats.settings["common_threshold"] = stats.app->add_option(
      "--common-threshold", f.run.common_threshold, "A disease is common when its count reaches this (default 20)");
  stats.settings["format"] = stats.app->add_option("--format", f.run.format, "Standard output format: json | table");
  stats.app->add_option("--histogram", f.histogram, "Also write the text histogram to this file");

  auto& augment = make("augment", "Sentence-substitution augmentation of long-tail diseases (train split only)",
                       std::string(kCorpusFormat) + "\nOutput: the input corpus followed by synthetic reports.");
  add_common(augment, f, true, true);
  augment.settings["min_count"] =
      augment.app->add_option("--min-count", f.run.min_count, "Smallest eligible label count (default 5)");
  augment.settings["max_count"] =
      augment.app->add_option("--max-count", f.run.max_count, "Largest eligible label count (default 100)");
  augment.settings["max_rounds"] = augment.app->add_option("--max-rounds", f.max_rounds, "Stop after this many rounds");
  augment.settings["sample_cap"] = augment.app->add_option(
      "--sample-cap", f.run.sample_cap, "Keep at most this many variants per round (seeded sample; needs --seed)");
  augment.settings["seed"] = augment.app->add_option("--seed", f.seed, "Random seed");
  augment.app->add_option("--report", f.report, "Write the augmentation report (JSON) here");

  auto& evaluate_cmd = make("evaluate", "Sensitivity, Diversity, DS and DOR of generated reports",
                            std::string(kCorpusFormat) + "\nBoth corpora must contain the same ids.");
  add_common(evaluate_cmd, f, false, true);
  evaluate_cmd.app->add_option("--gt", f.gt, "Ground-truth corpus")->required();
  evaluate_cmd.app->add_option("--gen", f.gen, "Generated corpus")->required();
  add_eval_flags(evaluate_cmd, f);

  auto& route_cmd = make("route", "Two-stage routing of generator outputs by classifier decisions",
                         std::string(kCorpusFormat) + "\n" + kDecisionFormat +
                             "\nRouting log lines: {id, classifier_decision, source, chosen_output}.");
  add_common(route_cmd, f, false, true);
  route_cmd.app->add_option("--free", f.free_outputs, "Disease-free generator outputs (corpus)")->required();
  route_cmd.app->add_option("--specific", f.specific_outputs, "Disease-specific generator outputs (corpus)")->required();
  route_cmd.app->add_option("--decisions", f.decisions, "Classifier decisions (JSONL)");
  route_cmd.app->add_option("--gt", f.gt, "Ground truth: simulates the classifier and evaluates the routed corpus");
  route_cmd.settings["flip_rate"] =
      route_cmd.app->add_option("--flip-rate", f.run.flip_rate, "Simulated classifier error rate (needs --seed)");
  route_cmd.settings["seed"] = route_cmd.app->add_option("--seed", f.seed, "Random seed");
  route_cmd.app->add_option("--decisions-out", f.decisions_out, "Write the decisions used");
  route_cmd.app->add_option("--log", f.log, "Write the routing log (JSONL)");
  route_cmd.app->add_option("--summary", f.summary, "Write the evaluation summary (JSON; needs --gt)");
  add_eval_flags(route_cmd, f);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  const std::string program = args.empty() ? "cxrkg" : args.front();

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string name;
  try {
    for (auto& [n, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      name = n;
      const auto cfg = resolve(cmd, f);
      if (n == "validate-kg") return cmd_validate_kg(cfg, out);
      if (n == "label") return cmd_label(cfg, out);
      if (n == "stats") return cmd_stats(cfg, f, out);
      if (n == "augment") return cmd_augment(cfg, f, out);
      if (n == "evaluate") return cmd_evaluate(cfg, f, out);
      if (n == "route") return cmd_route(cfg, f, out);
    }
    err << program << ": error: no subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << program << " " << name << ": usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const KgValidationError& e) {
    err << program << " " << name << ": validation failure: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FormatError& e) {
    err << program << " " << name << ": input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IdMismatchError& e) {
    err << program << " " << name << ": input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << program << " " << name << ": error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace cxrkg
