#include "fgym/error.hpp"

#include <utility>

namespace fgym {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidHorizon: return "InvalidHorizon";
    case ErrorCode::kHorizonTooLarge: return "HorizonTooLarge";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kCyclicPrerequisites: return "CyclicPrerequisites";
    case ErrorCode::kUnknownComponent: return "UnknownComponent";
    case ErrorCode::kUnknownChallenge: return "UnknownChallenge";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonFiniteForecast: return "NonFiniteForecast";
    case ErrorCode::kEmptyTrain: return "EmptyTrain";
    case ErrorCode::kPeriodTooLarge: return "PeriodTooLarge";
    case ErrorCode::kTrainTooShort: return "TrainTooShort";
    case ErrorCode::kDegenerateFit: return "DegenerateFit";
    case ErrorCode::kNotFitted: return "NotFitted";
    case ErrorCode::kUnknownForecaster: return "UnknownForecaster";
    case ErrorCode::kInvalidForecast: return "InvalidForecast";
    case ErrorCode::kSpawnFailed: return "SpawnFailed";
    case ErrorCode::kHandshakeTimeout: return "HandshakeTimeout";
    case ErrorCode::kProtocolVersionMismatch: return "ProtocolVersionMismatch";
    case ErrorCode::kChildExited: return "ChildExited";
    case ErrorCode::kReplyTimeout: return "ReplyTimeout";
    case ErrorCode::kMalformedReply: return "MalformedReply";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kRemoteError: return "RemoteError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(std::string position, const std::string& message)
    : Error(ErrorCode::kParseError, "at " + position + ": " + message),
      position_(std::move(position)) {}

namespace {

std::string describe_cycle(const std::vector<std::string>& cycle) {
  std::string out = "prerequisite cycle: ";
  for (const auto& id : cycle) {
    out += id;
    out += " -> ";
  }
  out += cycle.empty() ? std::string("?") : cycle.front();
  return out;
}

}  // namespace

CyclicPrerequisitesError::CyclicPrerequisitesError(std::vector<std::string> cycle)
    : Error(ErrorCode::kCyclicPrerequisites, describe_cycle(cycle)), cycle_(std::move(cycle)) {}

MalformedMessageError::MalformedMessageError(std::size_t offset, const std::string& message,
                                             std::string line)
    : Error(ErrorCode::kMalformedReply, "byte " + std::to_string(offset) + ": " + message),
      offset_(offset),
      line_(std::move(line)) {}

}  // namespace fgym
