#pragma once

#include <stdexcept>
#include <string>

namespace sprank {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that does not live on the model (wrong size, off-manifold, wrong base).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad numeric parameter: non-positive step, time outside a domain, ...
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DegeneratePlaneError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class AmbiguousEndpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace sprank
