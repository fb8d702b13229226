#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quantfp {

// Every failure raised by the library derives from Error and carries a short
// machine-readable kind ("domain", "config", ...). The CLI prints it verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error("numeric", m) {}
};
struct InputError : Error {
  explicit InputError(const std::string& m) : Error("input", m) {}
};
struct ResourceError : Error {
  explicit ResourceError(const std::string& m) : Error("resource", m) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string& m) : Error("solver", m) {}
};
struct ParameterError : Error {
  explicit ParameterError(const std::string& m) : Error("parameter", m) {}
};

}  // namespace quantfp
