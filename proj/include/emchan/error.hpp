// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <stdexcept>
#include <string>

namespace emchan {

enum class ErrorKind {
  config,        // bad configuration or precondition on inputs
  domain,        // argument outside the mathematical domain
  singularity,   // evaluation at a singular point (coincident points, r = 0)
  accuracy,      // quadrature or series failed its self-convergence check
  convergence,   // iterative solver hit its iteration budget
  ill_conditioned,
  packing,       // rejection sampling could not place scatterers
  io,
  internal
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace emchan
