#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cxrkg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input files, duplicate ids.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Two collections that must share an id set do not.
class IdMismatchError : public Error {
 public:
  IdMismatchError(std::vector<std::string> missing, std::vector<std::string> extra);

  const std::vector<std::string>& missing() const { return missing_; }
  const std::vector<std::string>& extra() const { return extra_; }

 private:
  std::vector<std::string> missing_;
  std::vector<std::string> extra_;
};

}  // namespace cxrkg
