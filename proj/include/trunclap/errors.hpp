#pragma once

#include <stdexcept>
#include <string>

namespace trunclap {

/// Bad arguments to a library call (non-finite entries, k out of range, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A domain that cannot answer the query (e.g. no normals).
class UnsupportedDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent scheme or solver configuration.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Both ends of an eigenvalue bracket classified the same way.
class BracketFailure : public std::runtime_error {
 public:
  BracketFailure(const std::string& what, double lo, double hi, bool lo_below, bool hi_below)
      : std::runtime_error(what), lo_(lo), hi_(hi), lo_below_(lo_below), hi_below_(hi_below) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool lo_below() const { return lo_below_; }
  bool hi_below() const { return hi_below_; }

 private:
  double lo_, hi_;
  bool lo_below_, hi_below_;
};

}  // namespace trunclap
