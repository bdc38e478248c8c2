#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace efdkit {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Too few spectral peaks/candidates to build the requested number of segments.
class SegmentationInfeasible : public Error {
 public:
  SegmentationInfeasible(std::size_t found, std::size_t required)
      : Error("segmentation infeasible: found " + std::to_string(found) +
              " candidate(s), need " + std::to_string(required)),
        found_(found),
        required_(required) {}

  std::size_t found() const noexcept { return found_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t found_;
  std::size_t required_;
};

class InvalidSegmentation : public Error {
 public:
  using Error::Error;
};

class EmptyBand : public Error {
 public:
  explicit EmptyBand(std::size_t segment)
      : Error("segment " + std::to_string(segment) + " contains no spectral bin"),
        segment_(segment) {}

  std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t segment_;
};

class NumericFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace efdkit
