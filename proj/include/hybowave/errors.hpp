#ifndef HYBOWAVE_ERRORS_HPP
#define HYBOWAVE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hwn {

/// Caller broke a documented precondition (shape mismatch, bad config value).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bad user-supplied input: unreadable files, malformed records, unknown labels.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Non-finite values or divergence during computation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hwn

#endif  // HYBOWAVE_ERRORS_HPP
