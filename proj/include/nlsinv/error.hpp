#pragma once

#include <stdexcept>
#include <string>

namespace nlsinv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violated an operation's precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration.
class FormatError : public Error {
 public:
  using Error::Error;
};

#define NLSINV_REQUIRE(cond, msg)                  \
  do {                                             \
    if (!(cond)) throw ::nlsinv::ParameterError(msg); \
  } while (false)

}  // namespace nlsinv
