#pragma once

#include <stdexcept>
#include <string>

namespace ghne {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument to an algebra operation (empty input, bad extent, NaN).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two grids that must agree in rank or extents do not.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Bank filter/channel bookkeeping violated (M_a != C_b, chain rule).
class ChannelMismatch : public Error {
 public:
  using Error::Error;
};

// A summand count no longer fits in 64 bits.
class CountOverflow : public Error {
 public:
  using Error::Error;
};

// Malformed model, epitome or image file.
class FormatError : public Error {
 public:
  enum class Kind {
    kParse,
    kBadMagic,
    kUnsupportedVersion,
    kTruncated,
    kTrailingData,
    kInvalidHeader,
    kInvalidValue,
    kUnsupportedImage,
  };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Filesystem failure (open, write, rename).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghne
