#ifndef QZD_ERRORS_HPP
#define QZD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qzd {

/// A physical or numerical precondition was violated (unresolvable width,
/// boundary leak, equilibrium starting point, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a packet starting at an equilibrium point is asked for a
/// teleportation time: there is none.
class NoTeleportationError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Invalid configuration, schema violation or malformed override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qzd

#endif  // QZD_ERRORS_HPP
