#pragma once

#include <stdexcept>
#include <string>

namespace hexcover {

// Bad user-supplied configuration (flags, bands, counts).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent documents, invalid routes, rejected instances.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bounded search or rejection loop ran out of budget.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced non-finite ratios or parameters.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition inside the library (programming error).
class LogicError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hexcover
