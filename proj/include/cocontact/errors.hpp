#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocontact {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Elementary operation evaluated outside its domain (ln of a non-positive
/// number, division by zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public Error {
 public:
  explicit UnknownIdentifier(const std::string& name)
      : Error("unknown identifier '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnboundParam : public Error {
 public:
  explicit UnboundParam(const std::string& name)
      : Error("parameter '" + name + "' has no value"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class ChartMismatch : public Error {
 public:
  using Error::Error;
};

/// Velocity Hessian of a Lagrangian is (numerically) singular.
class RegularityError : public Error {
 public:
  using Error::Error;
};

class NewtonNoConvergence : public Error {
 public:
  NewtonNoConvergence(const std::string& what, std::vector<double> last)
      : Error(what), last_iterate_(std::move(last)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

class StepFailure : public Error {
 public:
  using Error::Error;
};

class SampleDomainError : public Error {
 public:
  using Error::Error;
};

class JacobianSingular : public Error {
 public:
  using Error::Error;
};

class DenominatorVanishes : public Error {
 public:
  using Error::Error;
};

class DependenceViolation : public Error {
 public:
  using Error::Error;
};

class UnknownExample : public Error {
 public:
  explicit UnknownExample(const std::string& name)
      : Error("unknown example '" + name + "'") {}
};

class ParamSchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace cocontact
