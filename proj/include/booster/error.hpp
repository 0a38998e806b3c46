#ifndef BOOSTER_ERROR_HPP
#define BOOSTER_ERROR_HPP

#include <stdexcept>
#include <string>

namespace booster {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a design or processing routine.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// RMS normalization of a silent buffer.
class NormalizationError : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent schedule, gain table or trial log.
class FormatError : public Error {
public:
  using Error::Error;
};

class ScreeningError : public Error {
public:
  using Error::Error;
};

class StatsError : public Error {
public:
  using Error::Error;
};

/// Trial log could not be written; the run did not advance.
class StorageError : public Error {
public:
  using Error::Error;
};

/// Operation requires an active trial.
class RunStateError : public Error {
public:
  using Error::Error;
};

} // namespace booster

#endif
