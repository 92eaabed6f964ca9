#pragma once

#include <stdexcept>
#include <string>

namespace sheriff {

// Root of every error raised by the library. Modules derive their own
// typed errors so callers can catch precisely what an operation documents.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Fewer than two usable results where a comparison needs at least two.
class QuorumFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace sheriff
