#pragma once

#include <stdexcept>
#include <string>

namespace fewshot {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: invalid config values, missing files, HTTP 4xx.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Network failure, timeout or HTTP 5xx after the retry budget is spent.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Proposer or improver output that yielded no usable example.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// A domain invariant was violated (duplicate ids, empty text, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration refused because the example set is too large.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace fewshot
