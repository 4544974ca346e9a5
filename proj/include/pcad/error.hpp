#pragma once

#include <stdexcept>
#include <string>

namespace pcad {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidProfile : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidBinding : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyObservation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyRender : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoOverlap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pcad
