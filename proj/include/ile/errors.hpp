#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ile {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct EmptyGraphError : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct SelfLoopError : Error {
  using Error::Error;
};
struct DuplicateEdgeError : Error {
  using Error::Error;
};
struct NonPositiveWeightError : Error {
  using Error::Error;
};
struct NotConnectedError : Error {
  using Error::Error;
};
struct MissingLabelsError : Error {
  using Error::Error;
};
struct NonFiniteError : Error {
  using Error::Error;
};
struct TooLargeError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct InvalidProbability : Error {
  using Error::Error;
};
struct EmptyBlocks : Error {
  using Error::Error;
};
struct OddN : Error {
  using Error::Error;
};
struct InvalidFraction : Error {
  using Error::Error;
};
struct InvalidRatio : Error {
  using Error::Error;
};
struct TooSmallError : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};
struct TooFewValues : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::int64_t line_no)
      : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  std::int64_t line;
};

// Carries the best residuals seen so far, for diagnostics.
struct NoConvergenceError : Error {
  NoConvergenceError(const std::string& what, std::vector<double> residuals,
                     std::int64_t iters)
      : Error(what), best_residuals(std::move(residuals)), iterations(iters) {}
  std::vector<double> best_residuals;
  std::int64_t iterations = 0;
};

}  // namespace ile
