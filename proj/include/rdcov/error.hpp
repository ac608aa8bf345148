#pragma once

#include <stdexcept>
#include <string>

namespace rdcov {

// Error categories; the CLI maps each category to a distinct exit code.
enum class ErrorCode {
  usage,                 // bad flags / invalid configuration values
  ingestion,             // CSV or config file problems
  invalid_kernel,        // custom kernel violates kernel requirements
  invalid_bandwidth,     // h <= 0
  invalid_density,       // density estimate <= 0
  range,                 // argument outside its documented range
  singular,              // rank deficiency / condition estimate exceeded
  insufficient_support,  // too few in-bandwidth observations
  one_sided_data,        // all kernel weight on one side of the cutoff
  numerical,             // other numerical failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::ingestion: return "ingestion";
    case ErrorCode::invalid_kernel: return "invalid-kernel";
    case ErrorCode::invalid_bandwidth: return "invalid-bandwidth";
    case ErrorCode::invalid_density: return "invalid-density";
    case ErrorCode::range: return "range";
    case ErrorCode::singular: return "singular-design";
    case ErrorCode::insufficient_support: return "insufficient-support";
    case ErrorCode::one_sided_data: return "one-sided-data";
    case ErrorCode::numerical: return "numerical";
  }
  return "unknown";
}

// Exit codes: 0 ok, 2 usage, 3 ingestion, 4 numerical/singularity,
// 5 insufficient support.
inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage:
    case ErrorCode::range:
      return 2;
    case ErrorCode::ingestion:
      return 3;
    case ErrorCode::invalid_kernel:
    case ErrorCode::invalid_bandwidth:
    case ErrorCode::invalid_density:
    case ErrorCode::singular:
    case ErrorCode::numerical:
      return 4;
    case ErrorCode::insufficient_support:
    case ErrorCode::one_sided_data:
      return 5;
  }
  return 1;
}

}  // namespace rdcov
