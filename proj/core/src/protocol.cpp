#include "fgym/protocol.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "fgym/error.hpp"
#include "json.hpp"

namespace fgym::protocol {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 8> kKindNames = {
    "HELLO", "FIT", "PREDICT", "RESET", "SHUTDOWN", "OK", "FORECAST", "ERROR",
};

constexpr int kMaxHorizon = 10'000'000;

std::optional<Kind> parse_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == text) return static_cast<Kind>(i);
  return std::nullopt;
}

// Position of `"key"` followed by optional whitespace and a colon, at or after `from`.
std::size_t key_offset(std::string_view line, std::string_view key, std::size_t from = 0) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  for (auto pos = line.find(quoted, from); pos != std::string_view::npos;
       pos = line.find(quoted, pos + 1)) {
    auto after = pos + quoted.size();
    while (after < line.size() && (line[after] == ' ' || line[after] == '\t')) ++after;
    if (after < line.size() && line[after] == ':') return pos;
  }
  return std::string_view::npos;
}

// Offset of the closing brace of the outermost object (where a missing member was expected).
std::size_t closing_offset(std::string_view line) {
  const auto pos = line.find_last_of('}');
  return pos == std::string_view::npos ? line.size() : pos;
}

// Offset of the first numeric literal outside strings that overflows a double.
std::size_t overflow_offset(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '-' || (c >= '0' && c <= '9')) {
      std::size_t end = i + 1;
      while (end < line.size() && std::string_view("0123456789+-.eE").find(line[end]) != std::string_view::npos) ++end;
      const std::string token(line.substr(i, end - i));
      if (std::isinf(std::strtod(token.c_str(), nullptr))) return i;
      i = end - 1;
    }
  }
  return 0;
}

class Decoder {
 public:
  explicit Decoder(std::string_view line) : line_(line) {}

  [[noreturn]] void fail(std::size_t offset, const std::string& message) const {
    throw MalformedMessageError(std::min(offset, line_.size()), message, std::string(line_));
  }

  std::size_t at_key(std::string_view key, std::size_t from = 0) const {
    const auto pos = key_offset(line_, key, from);
    return pos == std::string_view::npos ? closing_offset(line_) : pos;
  }

  Message run() {
    json root;
    try {
      root = json::parse(line_.begin(), line_.end());
    } catch (const json::parse_error& e) {
      fail(e.byte == 0 ? 0 : e.byte - 1, "invalid JSON");
    } catch (const json::out_of_range& e) {
      fail(overflow_offset(line_), "number out of range");
    } catch (const json::exception& e) {
      fail(0, e.what());
    }
    if (!root.is_object()) fail(first_non_space(), "a message must be a JSON object");
    for (const auto& [key, _] : root.items())
      if (key != "id" && key != "kind" && key != "payload") fail(at_key(key), "unexpected member \"" + key + "\"");

    Message m;
    const auto id = root.find("id");
    if (id == root.end()) fail(closing_offset(line_), "missing member \"id\"");
    if (id->is_number_unsigned()) {
      const auto v = id->get<std::uint64_t>();
      if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        fail(at_key("id"), "id out of range");
      m.id = static_cast<std::int64_t>(v);
    } else {
      fail(at_key("id"), "id must be a non-negative integer");
    }

    const auto kind = root.find("kind");
    if (kind == root.end()) fail(closing_offset(line_), "missing member \"kind\"");
    if (!kind->is_string()) fail(at_key("kind"), "kind must be a string");
    const auto parsed = parse_kind(kind->get<std::string>());
    if (!parsed) fail(at_key("kind"), "unknown kind \"" + kind->get<std::string>() + "\"");
    m.kind = *parsed;

    const auto payload = root.find("payload");
    if (payload == root.end()) fail(closing_offset(line_), "missing member \"payload\"");
    payload_at_ = at_key("payload");
    if (!payload->is_object()) fail(payload_at_, "payload must be an object");
    m.payload = decode_payload(m.kind, *payload);
    return m;
  }

 private:
  std::size_t first_non_space() const {
    const auto pos = line_.find_first_not_of(" \t");
    return pos == std::string_view::npos ? 0 : pos;
  }

  std::size_t member_at(std::string_view key) const { return at_key(key, payload_at_); }

  void expect_members(const json& p, std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, _] : p.items()) {
      bool known = false;
      for (auto k : keys) known = known || k == key;
      if (!known) fail(member_at(key), "unexpected payload member \"" + key + "\"");
    }
    for (auto k : keys)
      if (!p.contains(std::string(k)))
        fail(closing_offset(line_), "missing payload member \"" + std::string(k) + "\"");
  }

  double finite_number(const json& v, std::string_view key) const {
    if (!v.is_number()) fail(member_at(key), "\"" + std::string(key) + "\" must contain numbers");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(member_at(key), "\"" + std::string(key) + "\" contains a non-finite number");
    return d;
  }

  Payload decode_payload(Kind kind, const json& p) const {
    switch (kind) {
      case Kind::kReset:
      case Kind::kShutdown:
      case Kind::kOk:
        expect_members(p, {});
        return Empty{};
      case Kind::kHello: {
        expect_members(p, {"name", "protocol"});
        const auto& version = p["protocol"];
        if (!version.is_number_integer() || version.get<std::int64_t>() < 0 ||
            version.get<std::int64_t>() > std::numeric_limits<int>::max())
          fail(member_at("protocol"), "protocol must be a non-negative integer");
        if (!p["name"].is_string()) fail(member_at("name"), "name must be a string");
        return Hello{static_cast<int>(version.get<std::int64_t>()), p["name"].get<std::string>()};
      }
      case Kind::kFit: {
        expect_members(p, {"y"});
        const auto& y = p["y"];
        if (!y.is_array()) fail(member_at("y"), "y must be an array");
        Fit fit;
        fit.y.reserve(y.size());
        for (const auto& v : y) {
          if (v.is_null()) fit.y.emplace_back(std::nullopt);
          else fit.y.emplace_back(finite_number(v, "y"));
        }
        return fit;
      }
      case Kind::kPredict: {
        expect_members(p, {"h"});
        const auto& h = p["h"];
        if (!h.is_number_integer() || h.get<std::int64_t>() < 1 || h.get<std::int64_t>() > kMaxHorizon)
          fail(member_at("h"), "h must be a positive integer");
        return Predict{static_cast<int>(h.get<std::int64_t>())};
      }
      case Kind::kForecast: {
        expect_members(p, {"yhat"});
        const auto& yhat = p["yhat"];
        if (!yhat.is_array()) fail(member_at("yhat"), "yhat must be an array");
        Forecast f;
        f.yhat.reserve(yhat.size());
        for (const auto& v : yhat) f.yhat.push_back(finite_number(v, "yhat"));
        return f;
      }
      case Kind::kError: {
        expect_members(p, {"message"});
        if (!p["message"].is_string()) fail(member_at("message"), "message must be a string");
        return ErrorReply{p["message"].get<std::string>()};
      }
    }
    fail(0, "unreachable");
  }

  std::string_view line_;
  std::size_t payload_at_ = 0;
};

json payload_json(const Payload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Empty>) {
          return json::object();
        } else if constexpr (std::is_same_v<T, Hello>) {
          return {{"name", p.name}, {"protocol", p.protocol}};
        } else if constexpr (std::is_same_v<T, Fit>) {
          auto y = json::array();
          for (const auto& v : p.y) y.push_back(v ? json(*v) : json());
          return {{"y", std::move(y)}};
        } else if constexpr (std::is_same_v<T, Predict>) {
          return {{"h", p.h}};
        } else if constexpr (std::is_same_v<T, Forecast>) {
          return {{"yhat", p.yhat}};
        } else {
          return {{"message", p.message}};
        }
      },
      payload);
}

}  // namespace

std::string_view to_string(Kind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

Message hello(std::int64_t id, std::string name) { return {Kind::kHello, id, Hello{kProtocolVersion, std::move(name)}}; }
Message fit(std::int64_t id, std::vector<Observation> y) { return {Kind::kFit, id, Fit{std::move(y)}}; }
Message predict(std::int64_t id, int h) { return {Kind::kPredict, id, Predict{h}}; }
Message reset(std::int64_t id) { return {Kind::kReset, id, Empty{}}; }
Message shutdown(std::int64_t id) { return {Kind::kShutdown, id, Empty{}}; }
Message ok(std::int64_t id) { return {Kind::kOk, id, Empty{}}; }
Message forecast(std::int64_t id, std::vector<double> yhat) { return {Kind::kForecast, id, Forecast{std::move(yhat)}}; }
Message error(std::int64_t id, std::string message) { return {Kind::kError, id, ErrorReply{std::move(message)}}; }

std::string encode(const Message& message) {
  json j;
  j["id"] = message.id;
  j["kind"] = std::string(to_string(message.kind));
  j["payload"] = payload_json(message.payload);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

Message decode(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  // The JSON parser tolerates both; neither is valid JSON text on the wire.
  if (line.starts_with("\xEF\xBB\xBF")) throw MalformedMessageError(0, "byte order mark", std::string(line));
  if (const auto nul = line.find('\0'); nul != std::string_view::npos)
    throw MalformedMessageError(nul, "NUL byte", std::string(line));
  try {
    return Decoder(line).run();
  } catch (const MalformedMessageError&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedMessageError(0, e.what(), std::string(line));
  }
}

std::string canonicalize(std::string_view line) { return encode(decode(line)); }

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> argv;
  std::string current;
  bool in_token = false;
  char quote = 0;
  for (char c : command) {
    if (quote != 0) {
      if (c == quote) quote = 0;
      else current += c;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_token) argv.push_back(std::move(current));
      current.clear();
      in_token = false;
    } else {
      current += c;
      in_token = true;
    }
  }
  if (in_token) argv.push_back(std::move(current));
  return argv;
}

}  // namespace fgym::protocol
