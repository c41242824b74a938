#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epswae {

/// Incompatible matrix/cloud dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition on arguments was violated (empty input, bad range, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is structurally valid but degenerate for the requested operation
/// (e.g. all reference points identical in the structural-consistency loss).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  explicit ParseError(const std::string& message)
      : std::runtime_error(message), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Training produced a NaN/Inf loss; carries the offending step and term.
class NonFiniteLossError : public std::runtime_error {
 public:
  NonFiniteLossError(std::size_t epoch, std::size_t step, const std::string& phase,
                     const std::string& term, double magnitude)
      : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(step) + ", phase " + phase +
                           ", term " + term + ", value " + std::to_string(magnitude)),
        epoch_(epoch),
        step_(step),
        phase_(phase),
        term_(term),
        magnitude_(magnitude) {}

  std::size_t epoch() const { return epoch_; }
  std::size_t step() const { return step_; }
  const std::string& phase() const { return phase_; }
  const std::string& term() const { return term_; }
  double magnitude() const { return magnitude_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
  std::string phase_;
  std::string term_;
  double magnitude_;
};

/// The thresholded graph never became connected; carries the component count.
class DisconnectedGraphError : public std::runtime_error {
 public:
  DisconnectedGraphError(const std::string& message, std::size_t components)
      : std::runtime_error(message + " (" + std::to_string(components) +
                           " components)"),
        components_(components) {}

  std::size_t components() const { return components_; }

 private:
  std::size_t components_;
};

}  // namespace epswae
