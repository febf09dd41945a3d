#pragma once

#include <optional>
#include <string_view>

namespace fgym {

enum class Status { kPass, kFail, kSkip, kError };

/// "PASS", "FAIL", "SKIP", "ERROR".
std::string_view to_string(Status status) noexcept;
std::optional<Status> parse_status(std::string_view text) noexcept;

/// Statuses that gate dependents under automatic gating.
constexpr bool blocks_dependents(Status s) noexcept {
  return s == Status::kFail || s == Status::kSkip || s == Status::kError;
}

}  // namespace fgym
