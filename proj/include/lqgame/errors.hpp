#pragma once

#include <stdexcept>
#include <string>

namespace lqgame {

/// Thrown when a computation produces non-finite values; carries the time
/// (and, for path simulation, the path index) where it happened.
class NumericOverflowError : public std::runtime_error {
 public:
  NumericOverflowError(const std::string& what, double time, long path_index = -1)
      : std::runtime_error(what), time_(time), path_index_(path_index) {}

  double time() const { return time_; }
  long path_index() const { return path_index_; }

 private:
  double time_;
  long path_index_;
};

/// Thrown by strategy construction when the Riccati solution fails the
/// regularity conditions; the message names the failed condition.
class RegularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lqgame
