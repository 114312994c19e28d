#pragma once

#include <stdexcept>
#include <string>

namespace dblrot {

// Error taxonomy shared by the library and the command line tool.
// The tool maps each family to a fixed process exit code, so new error
// types should derive from one of these rather than std::runtime_error.

// Bad arguments or malformed configuration. Exit code 1.
class invalid_input_error : public std::runtime_error {
 public:
  explicit invalid_input_error(const std::string& what)
      : std::runtime_error(what) {}
};

// A resource cap was hit (component budgets, cell budgets). Exit code 2.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what)
      : std::runtime_error(what) {}
};

// A statistical precondition failed; the computation is well formed but
// the data cannot support the requested conclusion. Exit code 3.
class statistical_error : public std::runtime_error {
 public:
  explicit statistical_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Requested quantity needs an integrable reciprocal displacement and the
// classification said otherwise (or could not decide).
class not_integrable_error : public statistical_error {
 public:
  explicit not_integrable_error(const std::string& what)
      : statistical_error(what) {}
};

// Log-log regression had too few usable points or zero spread.
class degenerate_fit_error : public statistical_error {
 public:
  explicit degenerate_fit_error(const std::string& what)
      : statistical_error(what) {}
};

// A hypothesis test would run with too little mass per cell to mean anything.
class underpowered_test_error : public statistical_error {
 public:
  explicit underpowered_test_error(const std::string& what)
      : statistical_error(what) {}
};

// A step probability left [0,1] after accounting for rounding slack.
class invalid_probability_error : public statistical_error {
 public:
  explicit invalid_probability_error(const std::string& what)
      : statistical_error(what) {}
};

// Set construction would need arc lengths below the smallest positive
// normal double. Subtype of invalid input (exit code 1).
class unrepresentable_depth_error : public invalid_input_error {
 public:
  explicit unrepresentable_depth_error(const std::string& what)
      : invalid_input_error(what) {}
};

}  // namespace dblrot
