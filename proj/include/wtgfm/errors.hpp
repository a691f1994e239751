#pragma once

#include <stdexcept>
#include <string>

namespace wtgfm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a surface, table or model.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A root-finding problem has no solution on its admissible bracket.
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Simulation left the admissible state region (v_dc <= 0, omega_r <= 0,
// non-finite or exploding states).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wtgfm
