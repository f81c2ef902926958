#pragma once

#include <stdexcept>
#include <string>

namespace hubrl {

// Base class for every error thrown by this library. Catching hubrl::Error
// at a tool boundary is enough to turn any failure into a clean exit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// wire: peer did not produce the requested bytes in time.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

// wire: peer closed the connection (and no buffered bytes remain).
class DisconnectedError : public Error {
 public:
  using Error::Error;
};

// wire: payload length is not 4 * expected float count.
class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

// wire: refusing to encode NaN or infinity into a frame.
class NonFiniteValueError : public Error {
 public:
  using Error::Error;
};

// wire: frequency probe asked for zero exchanges.
class InvalidCountError : public Error {
 public:
  using Error::Error;
};

// core: replay sample requested before the buffer holds a full batch.
class UnderfilledBufferError : public Error {
 public:
  using Error::Error;
};

// envs: action component outside [-1, 1].
class ActionOutOfBoundsError : public Error {
 public:
  using Error::Error;
};

// envs/harness: name not present in the registry.
class UnknownEnvError : public Error {
 public:
  using Error::Error;
};

// core/nn: tensor or vector dimensions do not match what the op expects.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

// agents/harness: checkpoint does not match the requested env/agent shapes.
class SpecMismatchError : public Error {
 public:
  using Error::Error;
};

// harness: plot asked for run directories that contain no readable logs.
class MissingLogsError : public Error {
 public:
  using Error::Error;
};

// harness: bad or contradictory run configuration (reported before any
// episode runs).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hubrl
