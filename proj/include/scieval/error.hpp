#pragma once

#include <stdexcept>
#include <string>

namespace scieval {

// Invalid or inconsistent input: malformed rows, duplicate keys, dangling
// references, unusable configuration. The message names the offending
// file/entity so CLI diagnostics can surface it directly.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that cannot be answered from the data as given: missing
// normalization pool, degenerate regression design, empty comparison group.
class ComputeError : public std::runtime_error {
 public:
  explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace scieval
