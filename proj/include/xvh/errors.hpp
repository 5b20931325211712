#pragma once

#include <stdexcept>
#include <string>

namespace xvh {

// Malformed or inconsistent input (files, manifests, specs, shapes).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear system the solver cannot handle (singular shifts, non-finite data).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xvh
