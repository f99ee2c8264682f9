#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace toprank {

// Bad argument or violated precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Object used in a state that does not permit the call (stale trace, empty model).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed feature file or checkpoint. `location` is a 1-based row for text
// input and a byte offset for binary input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : std::runtime_error(what), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(int epoch)
      : std::runtime_error("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch)),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace toprank
