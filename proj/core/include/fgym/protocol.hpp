#pragma once

// Protocol v1: newline-delimited JSON over a child process's stdin/stdout.
// PROTOCOL.md at the repository root is the normative description.

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fgym/forecasters.hpp"
#include "fgym/subprocess.hpp"
#include "fgym/synthgen.hpp"

namespace fgym::protocol {

inline constexpr int kProtocolVersion = 1;

enum class Kind { kHello, kFit, kPredict, kReset, kShutdown, kOk, kForecast, kError };

std::string_view to_string(Kind kind) noexcept;

struct Hello {
  int protocol = kProtocolVersion;
  std::string name;
  bool operator==(const Hello&) const = default;
};
struct Fit {
  std::vector<Observation> y;
  bool operator==(const Fit&) const = default;
};
struct Predict {
  int h = 0;
  bool operator==(const Predict&) const = default;
};
struct Forecast {
  std::vector<double> yhat;
  bool operator==(const Forecast&) const = default;
};
struct ErrorReply {
  std::string message;
  bool operator==(const ErrorReply&) const = default;
};
/// RESET, SHUTDOWN and OK carry an empty payload object.
struct Empty {
  bool operator==(const Empty&) const = default;
};

using Payload = std::variant<Empty, Hello, Fit, Predict, Forecast, ErrorReply>;

struct Message {
  Kind kind = Kind::kOk;
  std::int64_t id = 0;
  Payload payload;

  bool operator==(const Message&) const = default;
};

Message hello(std::int64_t id, std::string name);
Message fit(std::int64_t id, std::vector<Observation> y);
Message predict(std::int64_t id, int h);
Message reset(std::int64_t id);
Message shutdown(std::int64_t id);
Message ok(std::int64_t id);
Message forecast(std::int64_t id, std::vector<double> yhat);
Message error(std::int64_t id, std::string message);

/// Canonical single-line encoding: sorted keys, no insignificant whitespace,
/// no trailing newline.
std::string encode(const Message& message);

/// Strict decoding. Throws MalformedMessageError carrying the byte offset of
/// the problem; never throws anything else.
Message decode(std::string_view line);

/// decode() followed by encode(); the canonical form of a valid line.
std::string canonicalize(std::string_view line);

/// Validates a raw reply line against the request it answers: decodes it,
/// checks the id, the reply kind and (for PREDICT) the forecast length.
/// Throws MalformedMessageError, Error{kIdMismatch} or Error{kRemoteError}.
Message check_reply(const Message& request, std::string_view line);

struct Timeouts {
  std::chrono::milliseconds handshake{10'000};
  std::chrono::milliseconds fit{120'000};
  std::chrono::milliseconds predict{30'000};
  std::chrono::milliseconds control{10'000};  // RESET and SHUTDOWN
};

/// One external pipeline process. Strictly one request in flight.
class Client {
 public:
  /// Spawns `argv`, sends HELLO and waits for a HELLO reply with protocol 1.
  /// Throws Error{kSpawnFailed}, Error{kHandshakeTimeout} or
  /// Error{kProtocolVersionMismatch}.
  static std::unique_ptr<Client> spawn_and_handshake(const std::vector<std::string>& argv,
                                                     Timeouts timeouts = {});

  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  /// Sends `request` (its id is replaced by the next id) and returns the reply.
  /// ERROR replies throw Error{kRemoteError}. Also throws kChildExited,
  /// kReplyTimeout, kMalformedReply (MalformedMessageError) and kIdMismatch.
  /// Timeouts and protocol violations kill the child.
  Message round_trip(Message request, std::chrono::milliseconds timeout);

  /// Sends SHUTDOWN and waits briefly; kills the child if it lingers.
  void shutdown();

  bool alive() const;
  const std::string& remote_name() const noexcept { return remote_name_; }
  const Timeouts& timeouts() const noexcept { return timeouts_; }
  /// Raw lines that failed to decode, for diagnostics.
  const std::vector<std::string>& rejected_lines() const noexcept { return rejected_; }

 private:
  Client(std::unique_ptr<ChildProcess> child, Timeouts timeouts);

  std::unique_ptr<ChildProcess> child_;
  Timeouts timeouts_;
  std::int64_t next_id_ = 0;
  std::string remote_name_;
  std::vector<std::string> rejected_;
};

/// ForecasterContract over protocol v1. reset() respawns the child if it died.
class ExternalForecaster final : public Forecaster {
 public:
  ExternalForecaster(std::vector<std::string> argv, Timeouts timeouts = {});

  std::string name() const override;
  void fit(std::span<const Observation> train) override;
  std::vector<double> predict(int horizon) override;
  void reset() override;

 private:
  Client& client();

  std::vector<std::string> argv_;
  Timeouts timeouts_;
  std::unique_ptr<Client> client_;
  bool fitted_ = false;
};

/// Splits a "cmd:" argument into argv on whitespace; single and double quotes group.
std::vector<std::string> split_command(std::string_view command);

}  // namespace fgym::protocol
