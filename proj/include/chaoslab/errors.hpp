#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chaoslab {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed arguments: mixed point variants, bad weights, non-unit normals,
// permutations that are not permutations, and the like.
struct InvalidInputError : Error {
  using Error::Error;
};

// A requested computation exceeds a configured size cap (enumeration limits,
// support caps, product-measure budgets).
struct CapacityError : Error {
  using Error::Error;
};

// A numeric integration left the representable range. Carries the step at
// which the blowup was detected.
struct NumericBlowupError : Error {
  NumericBlowupError(const std::string& what, std::int64_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_index(step) {}
  std::int64_t step_index;
};

// Step-size / stability preconditions (CFL checks, t not a step multiple).
struct StepSizeError : Error {
  using Error::Error;
};

// Experiment configuration problems. `messages` lists every defect found so
// a user can fix the file in one pass.
struct ConfigError : Error {
  explicit ConfigError(std::vector<std::string> msgs)
      : Error(join(msgs)), messages(std::move(msgs)) {}
  std::vector<std::string> messages;

 private:
  static std::string join(const std::vector<std::string>& msgs) {
    std::string out = "configuration invalid:";
    for (const auto& m : msgs) out += "\n  - " + m;
    return out;
  }
};

// Filesystem failures while writing reports.
struct IoError : Error {
  using Error::Error;
};

}  // namespace chaoslab
