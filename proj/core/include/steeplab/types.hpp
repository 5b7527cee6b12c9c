#pragma once

namespace steeplab {

/// How a piecewise-defined function is read at one of its breakpoints.
enum class Limit {
  kValue,      ///< the defined value at the point
  kFromLeft,   ///< left limit
  kFromRight,  ///< right limit
};

}  // namespace steeplab
