#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cxrkg {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitValidation = 3,
};

// Resolved run settings: flags > --config file > these defaults.
struct RunConfig {
  std::string kg_path;
  std::string input;
  std::string output;
  std::size_t common_threshold = 20;
  std::size_t min_count = 5;
  std::size_t max_count = 100;
  std::optional<std::size_t> max_rounds;
  std::size_t sample_cap = 0;
  std::string diversity_mode = "reference-set";
  std::string match_mode = "pair";
  bool haldane = false;
  double flip_rate = 0.0;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  unsigned threads = 0;
};

// args[0] is the program name. Never throws; errors go to `err` and the
// exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cxrkg
