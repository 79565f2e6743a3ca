#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cxrkg {

enum class Split { train, validation, test };

std::string_view to_string(Split s);
// Throws FormatError for anything other than train|validation|test.
Split parse_split(std::string_view s);

struct ReportRecord {
  std::string id;
  std::string text;
  Split split = Split::train;
  // Absent and empty are kept distinct so files round-trip unchanged.
  std::optional<std::vector<std::string>> images;

  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

}  // namespace cxrkg
