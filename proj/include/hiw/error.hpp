#pragma once

#include <stdexcept>
#include <string>

namespace hiw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed q-expansion file or report input.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// sqrt_mod: x is a quadratic non-residue.
class NotAResidue : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// sqrt_mod: x is divisible by p.
class ZeroResidue : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace hiw
