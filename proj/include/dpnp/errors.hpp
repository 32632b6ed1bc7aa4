#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dpnp {

// Invalid run configuration (bad schedule parameters, malformed model
// dimensions, annealing plan that cannot be executed, ...).  Raised during
// validation, before any sampling starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The diffusion schedule has no usable step for the requested noise level:
// the truncation index T' is zero, so a denoising run would have nothing to
// integrate.
class InsufficientScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A verification grid is too coarse for the requested smoothing level.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A verification grid misses the support of the density it should carry
// (everything evaluates to zero on it).
class DomainCoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sampler produced a non-finite state or log-density.  Carries the
// offending state so callers can log or dump it.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::vector<double> state)
      : std::runtime_error(what), state_(std::move(state)) {}

  const std::vector<double>& state() const { return state_; }

 private:
  std::vector<double> state_;
};

}  // namespace dpnp
