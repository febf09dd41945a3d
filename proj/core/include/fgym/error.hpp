#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fgym {

/// Every failure raised by the library carries one of these codes so callers
/// can branch on the kind of failure without parsing messages.
enum class ErrorCode {
  // synthgen
  kInvalidSpec,
  kInvalidHorizon,
  kHorizonTooLarge,
  // challenges
  kParseError,
  kCyclicPrerequisites,
  kUnknownComponent,
  kUnknownChallenge,
  // metrics
  kLengthMismatch,
  kNonFiniteForecast,
  // forecasters
  kEmptyTrain,
  kPeriodTooLarge,
  kTrainTooShort,
  kDegenerateFit,
  kNotFitted,
  kUnknownForecaster,
  kInvalidForecast,
  // protocol
  kSpawnFailed,
  kHandshakeTimeout,
  kProtocolVersionMismatch,
  kChildExited,
  kReplyTimeout,
  kMalformedReply,
  kIdMismatch,
  kRemoteError,
  // io
  kIoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A suite document failed to parse or did not match the schema.
/// `position` is either "byte N" or a JSON pointer to the offending member.
class ParseError : public Error {
 public:
  ParseError(std::string position, const std::string& message);

  const std::string& position() const noexcept { return position_; }

 private:
  std::string position_;
};

class CyclicPrerequisitesError : public Error {
 public:
  explicit CyclicPrerequisitesError(std::vector<std::string> cycle);

  /// Challenge ids on the cycle, in traversal order, without repeating the start.
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

/// A protocol line that could not be decoded. `offset` is the zero-based byte
/// offset inside the line where the problem was detected.
class MalformedMessageError : public Error {
 public:
  MalformedMessageError(std::size_t offset, const std::string& message, std::string line);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& line() const noexcept { return line_; }

 private:
  std::size_t offset_;
  std::string line_;
};

}  // namespace fgym
