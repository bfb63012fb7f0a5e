#pragma once

#include <stdexcept>
#include <string>

namespace mctslab {

/// A numerical routine produced a result outside its guaranteed accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN or infinity reached a tree statistic.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No particle survived the observation filter.
class BeliefCollapse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation's contract (wrong regularizer kind, empty belief, ...).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mctslab
