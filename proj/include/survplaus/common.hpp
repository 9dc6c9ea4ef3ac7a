#pragma once

#include <stdexcept>
#include <string>

namespace survplaus {

inline constexpr const char* kVersion = "0.1.0";

// Thrown when a dataset cannot support the requested estimate, e.g. an
// all-censored exponential sample or fewer events than free parameters.
class degenerate_data_error : public std::runtime_error {
 public:
  explicit degenerate_data_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Thrown when a Monte Carlo configuration keeps producing degenerate
// replicates and cannot make progress.
class degenerate_configuration_error : public std::runtime_error {
 public:
  explicit degenerate_configuration_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace survplaus
