#pragma once

#include <stdexcept>
#include <string>

namespace eprsim {

// A solver or integrator could not meet its contractual tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eprsim
