#pragma once

#include <stdexcept>
#include <string>

namespace mcshane {

// Base of every error raised by the library. Callers that only care about
// "the computation could not be carried out" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A denominator or logarithm argument fell within the pole threshold.
class PoleError : public Error {
 public:
  using Error::Error;
};

// A trace in the closed interval [-2, 2] was given where a loxodromic or
// hyperbolic element is required.
class EllipticTraceError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Integer slope arithmetic left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class DegenerateCharacterError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcshane
