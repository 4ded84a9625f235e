#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msunmix {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied data was violated (shape mismatch,
/// negative value, NaN, empty overlap, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed. Carries the path and the position of the
/// offending token (line for text formats, byte offset for binary payloads).
class FormatError : public Error {
 public:
  FormatError(std::string path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// A file could not be opened, written or renamed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An algorithm could not produce a result (zero simplex volume, singular
/// system with no usable pseudo-inverse, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace msunmix
