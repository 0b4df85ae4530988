#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trendrev {

enum class ErrorKind {
  invalid_argument,   ///< parameter outside its domain, malformed config
  data_format,        ///< unreadable or inconsistent input file
  insufficient_data,  ///< too few points for the requested statistic
  horizon_too_small,  ///< 1 - C(tau) vanishes, slope formula undefined
  no_crossing,        ///< no sign change on the searched bracket
  degenerate_design,  ///< singular regression design
  no_convergence,     ///< optimizer exhausted every start
  internal,           ///< unreachable numerical state
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace trendrev
