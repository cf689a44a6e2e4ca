#ifndef LDSIM_ERRORS_H_
#define LDSIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ldsim {

// Argument outside an operation's domain (e.g. z outside [0,1]).
class Domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Model or run configuration that cannot be honoured.
class Config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data that fails parsing or validation. Carries the 1-based line
// number when one applies (0 otherwise).
class Data_error : public std::runtime_error {
 public:
  Data_error(const std::string& what, long line = 0) : std::runtime_error{what}, line_{line} {}
  auto line() const -> long { return line_; }

 private:
  long line_;
};

class Io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested run would exceed the configured memory budget.
class Resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldsim

#endif  // LDSIM_ERRORS_H_
