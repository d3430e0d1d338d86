#pragma once

#include <stdexcept>
#include <string>

namespace kuramoto {

/// Numerical failure during a run (blow-up, no lock, non-convergence).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State became non-finite. `time` is the first step end with a bad value.
class BlowUp : public RuntimeFailure {
 public:
  BlowUp(double time, const std::string& what) : RuntimeFailure(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// A phase-difference trajectory left the region |theta_ij| <= r.
class RegionExit : public RuntimeFailure {
 public:
  RegionExit(double time, const std::string& what) : RuntimeFailure(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace kuramoto
