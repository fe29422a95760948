#pragma once

#include <stdexcept>

namespace sc {

// Mass and hbar for the 1d analytic module. The billiard modules work in
// the dimensionless convention hbar = 2m = 1, E = k^2, and state so locally.
struct PhysicalUnits {
  double mass = 1.0;
  double hbar = 1.0;

  void validate() const {
    if (!(mass > 0.0) || !(hbar > 0.0))
      throw std::invalid_argument("PhysicalUnits: mass and hbar must be positive");
  }
};

}  // namespace sc
