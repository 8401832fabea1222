#pragma once

#include <stdexcept>
#include <string>

namespace dsgof {

enum class ErrorKind {
  Validation,  // bad input: malformed data, out-of-range parameters
  Numerical,   // a computation failed: non-convergence, degenerate model
};

// Every library error carries the module and operation that raised it so the
// CLI can report provenance and pick an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string operation,
        const std::string& message)
      : std::runtime_error(module + "::" + operation + ": " + message),
        kind_(kind),
        module_(std::move(module)),
        operation_(std::move(operation)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string operation_;
};

[[noreturn]] inline void fail_validation(const char* module, const char* op,
                                         const std::string& msg) {
  throw Error(ErrorKind::Validation, module, op, msg);
}

[[noreturn]] inline void fail_numerical(const char* module, const char* op,
                                        const std::string& msg) {
  throw Error(ErrorKind::Numerical, module, op, msg);
}

}  // namespace dsgof
