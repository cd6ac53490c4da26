#pragma once

#include <stdexcept>
#include <string>

namespace dra {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DirectedUnbalanced : Error {
  using Error::Error;
};
struct InvalidRange : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct IntervalEmpty : Error {
  using Error::Error;
};
struct ZeroCoefficient : Error {
  using Error::Error;
};
struct EmptyDomain : Error {
  using Error::Error;
};
struct DirectedGraphRejected : Error {
  using Error::Error;
};
struct HistoryUnderflow : Error {
  using Error::Error;
};
struct NonPositiveInput : Error {
  using Error::Error;
};
struct InfeasiblePoint : Error {
  using Error::Error;
};
struct BracketFailure : Error {
  using Error::Error;
};
struct TooManyAgents : Error {
  using Error::Error;
};
struct EmptyFeasibleGrid : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace dra
