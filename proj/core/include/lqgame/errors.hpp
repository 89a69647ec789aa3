#pragma once

#include <stdexcept>
#include <string>

namespace lqgame {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input matrices do not conform (wrong shapes, non-finite entries,
/// excessive asymmetry of a nominally symmetric matrix).
struct InvalidInput : Error {
  using Error::Error;
};

/// The vectorized Lyapunov operator is rank-deficient; the system sits on
/// the mean-square stability boundary and the equation has no unique
/// solution.
struct SingularOperator : Error {
  using Error::Error;
};

/// The Lyapunov-positivity route and the spectral-abscissa route of the
/// stability test disagree beyond tolerance.
struct InconsistentRoutes : Error {
  using Error::Error;
};

/// A solver that requires a mean-square stable system was handed an
/// unstable one.
struct NotStable : Error {
  using Error::Error;
};

/// A simulated state left the admissible region (|X| > divergence cutoff),
/// which signals a closed loop that is not a stabilizer.
struct Diverged : Error {
  using Error::Error;
};

/// Problem or report file could not be parsed; message carries location.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace lqgame
