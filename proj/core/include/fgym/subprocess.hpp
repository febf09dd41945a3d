#pragma once

// POSIX child process with its stdin and stdout connected to a socket pair.
// stderr is inherited. The destructor kills and reaps the child.

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <sys/types.h>

namespace fgym {

class ChildProcess {
 public:
  /// Throws Error{kSpawnFailed} when the program cannot be executed.
  explicit ChildProcess(const std::vector<std::string>& argv);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  enum class ReadStatus { kLine, kEof, kTimeout };
  enum class WriteStatus { kOk, kClosed, kTimeout };

  WriteStatus write_all(std::string_view bytes, std::chrono::steady_clock::time_point deadline);
  /// Reads one line (without the newline) before the deadline.
  ReadStatus read_line(std::string& line, std::chrono::steady_clock::time_point deadline);

  /// True until the child has been reaped.
  bool running();
  /// Waits up to `grace` for a voluntary exit, then SIGKILLs. Idempotent.
  void terminate(std::chrono::milliseconds grace = std::chrono::milliseconds(0));
  std::optional<int> exit_status() const noexcept { return exit_status_; }
  pid_t pid() const noexcept { return pid_; }

 private:
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  std::optional<int> exit_status_;
  bool reaped_ = false;
};

}  // namespace fgym
