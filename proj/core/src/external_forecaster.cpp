#include <cmath>
#include <iostream>

#include "fgym/error.hpp"
#include "fgym/protocol.hpp"
#include "fgym/version.hpp"

namespace fgym::protocol {

namespace {

Kind expected_reply(Kind request) {
  switch (request) {
    case Kind::kHello: return Kind::kHello;
    case Kind::kPredict: return Kind::kForecast;
    default: return Kind::kOk;
  }
}

}  // namespace

Message check_reply(const Message& request, std::string_view line) {
  auto reply = decode(line);
  if (reply.id != request.id)
    throw Error(ErrorCode::kIdMismatch, "reply id " + std::to_string(reply.id) + " does not match request id " +
                                            std::to_string(request.id));
  if (reply.kind == Kind::kError)
    throw Error(ErrorCode::kRemoteError, std::get<ErrorReply>(reply.payload).message);
  const auto expected = expected_reply(request.kind);
  if (reply.kind != expected) {
    const auto pos = line.find("\"kind\"");
    throw MalformedMessageError(pos == std::string_view::npos ? 0 : pos,
                                std::string(to_string(request.kind)) + " must be answered by " +
                                    std::string(to_string(expected)) + ", got " + std::string(to_string(reply.kind)),
                                std::string(line));
  }
  if (request.kind == Kind::kPredict) {
    const auto h = static_cast<std::size_t>(std::get<Predict>(request.payload).h);
    const auto& yhat = std::get<Forecast>(reply.payload).yhat;
    if (yhat.size() != h) {
      const auto pos = line.find("\"yhat\"");
      throw MalformedMessageError(pos == std::string_view::npos ? 0 : pos,
                                  "FORECAST has " + std::to_string(yhat.size()) + " values, " + std::to_string(h) +
                                      " requested",
                                  std::string(line));
    }
  }
  return reply;
}

Client::Client(std::unique_ptr<ChildProcess> child, Timeouts timeouts)
    : child_(std::move(child)), timeouts_(timeouts) {}

Client::~Client() {
  try {
    shutdown();
  } catch (...) {
  }
}

std::unique_ptr<Client> Client::spawn_and_handshake(const std::vector<std::string>& argv,
                                                    Timeouts timeouts) {
  auto client = std::unique_ptr<Client>(new Client(std::make_unique<ChildProcess>(argv), timeouts));
  Message reply;
  try {
    reply = client->round_trip(hello(0, kToolName), timeouts.handshake);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kChildExited)
      throw Error(ErrorCode::kSpawnFailed, "child exited before completing the handshake");
    if (e.code() == ErrorCode::kReplyTimeout)
      throw Error(ErrorCode::kHandshakeTimeout, "no HELLO within the handshake timeout");
    throw;
  }
  const auto& h = std::get<Hello>(reply.payload);
  if (h.protocol != kProtocolVersion) {
    client->child_->terminate();
    throw Error(ErrorCode::kProtocolVersionMismatch,
                "child speaks protocol " + std::to_string(h.protocol) + ", expected " +
                    std::to_string(kProtocolVersion));
  }
  client->remote_name_ = h.name;
  return client;
}

bool Client::alive() const { return child_ && child_->running(); }

Message Client::round_trip(Message request, std::chrono::milliseconds timeout) {
  request.id = next_id_++;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  const std::string what(to_string(request.kind));

  switch (child_->write_all(encode(request) + "\n", deadline)) {
    case ChildProcess::WriteStatus::kOk: break;
    case ChildProcess::WriteStatus::kClosed:
      child_->terminate(std::chrono::milliseconds(100));
      throw Error(ErrorCode::kChildExited, "child closed its input before " + what);
    case ChildProcess::WriteStatus::kTimeout:
      child_->terminate();
      throw Error(ErrorCode::kReplyTimeout, "timed out sending " + what);
  }

  std::string line;
  switch (child_->read_line(line, deadline)) {
    case ChildProcess::ReadStatus::kLine: break;
    case ChildProcess::ReadStatus::kEof:
      child_->terminate(std::chrono::milliseconds(100));
      throw Error(ErrorCode::kChildExited, "child exited while awaiting the reply to " + what);
    case ChildProcess::ReadStatus::kTimeout:
      child_->terminate();
      throw Error(ErrorCode::kReplyTimeout, "no reply to " + what + " within " +
                                                std::to_string(timeout.count()) + " ms");
  }

  try {
    return check_reply(request, line);
  } catch (const MalformedMessageError&) {
    std::cerr << "[fgym] malformed reply: " << line << '\n';
    rejected_.push_back(line);
    child_->terminate();
    throw;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIdMismatch) child_->terminate();
    throw;
  }
}

void Client::shutdown() {
  if (!child_) return;
  if (child_->running()) {
    try {
      round_trip(protocol::shutdown(0), timeouts_.control);
    } catch (const Error&) {
    }
  }
  child_->terminate(std::chrono::milliseconds(500));
}

ExternalForecaster::ExternalForecaster(std::vector<std::string> argv, Timeouts timeouts)
    : argv_(std::move(argv)), timeouts_(timeouts) {
  client_ = Client::spawn_and_handshake(argv_, timeouts_);
}

std::string ExternalForecaster::name() const {
  return client_ && !client_->remote_name().empty() ? client_->remote_name() : argv_.front();
}

Client& ExternalForecaster::client() {
  if (!client_ || !client_->alive())
    throw Error(ErrorCode::kChildExited, "external forecaster is not running");
  return *client_;
}

void ExternalForecaster::fit(std::span<const Observation> train) {
  fitted_ = false;
  client().round_trip(protocol::fit(0, {train.begin(), train.end()}), timeouts_.fit);
  fitted_ = true;
}

std::vector<double> ExternalForecaster::predict(int horizon) {
  if (!fitted_) throw Error(ErrorCode::kNotFitted, name() + ": predict called before fit");
  auto reply = client().round_trip(protocol::predict(0, horizon), timeouts_.predict);
  return std::move(std::get<Forecast>(reply.payload).yhat);
}

void ExternalForecaster::reset() {
  fitted_ = false;
  if (client_ && client_->alive()) {
    try {
      client_->round_trip(protocol::reset(0), timeouts_.control);
      return;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kRemoteError) throw;
    }
  }
  client_.reset();
  client_ = Client::spawn_and_handshake(argv_, timeouts_);
}

}  // namespace fgym::protocol
