#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace cxrkg {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Calls `fn(line, line_number)` for every non-blank line; line numbers are 1-based.
void for_each_line(std::string_view text,
                   const std::function<void(std::string_view, std::size_t)>& fn);

}  // namespace cxrkg
