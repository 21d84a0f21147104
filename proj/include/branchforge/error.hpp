#ifndef BRANCHFORGE_ERROR_HPP
#define BRANCHFORGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bf {

// Error taxonomy shared by the library, the C API and the CLI exit codes.
enum class ErrorKind {
  invalid_argument,  // malformed input, spec violation
  parse,             // text format errors (carry line/column context)
  cap_exceeded,      // closure/ball/word-length/order cap hit
  search_failed,     // witness search exhausted its radius
  verify_failed,     // a certificate check did not hold
  unsupported,       // outside the supported regime
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace bf

#endif
