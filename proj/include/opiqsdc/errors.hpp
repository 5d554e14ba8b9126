#pragma once

#include <stdexcept>

namespace opiqsdc {

// The channel delivers no clicks at all (Q = 0), so error rates are undefined.
class DegenerateChannel : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A truncated photon-number series did not converge at the requested n_max.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace opiqsdc
