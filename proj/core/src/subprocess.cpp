#include "fgym/subprocess.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "fgym/error.hpp"

namespace fgym {

namespace {

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return static_cast<int>(std::clamp<long long>(left.count(), 0, 1'000'000'000));
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

ChildProcess::ChildProcess(const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error(ErrorCode::kSpawnFailed, "empty command");
  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  int sock[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sock) != 0)
    throw Error(ErrorCode::kSpawnFailed, std::string("socketpair: ") + std::strerror(errno));
  int status_pipe[2];
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
    ::close(sock[0]);
    ::close(sock[1]);
    throw Error(ErrorCode::kSpawnFailed, std::string("pipe: ") + std::strerror(errno));
  }

  const pid_t pid = ::fork();
  if (pid < 0) {
    const int err = errno;
    for (int fd : {sock[0], sock[1], status_pipe[0], status_pipe[1]}) ::close(fd);
    throw Error(ErrorCode::kSpawnFailed, std::string("fork: ") + std::strerror(err));
  }
  if (pid == 0) {
    // Only async-signal-safe calls from here on.
    ::dup2(sock[1], STDIN_FILENO);
    ::dup2(sock[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(status_pipe[1], &err, sizeof err);
    ::_exit(127);
  }

  ::close(sock[1]);
  ::close(status_pipe[1]);
  pid_ = pid;
  fd_ = sock[0];

  int exec_errno = 0;
  ssize_t got;
  do {
    got = ::read(status_pipe[0], &exec_errno, sizeof exec_errno);
  } while (got < 0 && errno == EINTR);
  ::close(status_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    terminate();
    throw Error(ErrorCode::kSpawnFailed,
                "cannot execute \"" + argv.front() + "\": " + std::strerror(exec_errno));
  }
}

ChildProcess::~ChildProcess() {
  close_fd(fd_);
  terminate(std::chrono::milliseconds(200));
}

ChildProcess::WriteStatus ChildProcess::write_all(std::string_view bytes,
                                                  std::chrono::steady_clock::time_point deadline) {
  if (fd_ < 0) return WriteStatus::kClosed;
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n > 0) {
      bytes.remove_prefix(static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      pollfd p{fd_, POLLOUT, 0};
      const int timeout = remaining_ms(deadline);
      if (timeout == 0) return WriteStatus::kTimeout;
      const int r = ::poll(&p, 1, timeout);
      if (r == 0) return WriteStatus::kTimeout;
      if (r < 0 && errno != EINTR) return WriteStatus::kClosed;
      if (r > 0 && (p.revents & (POLLERR | POLLHUP)) != 0 && (p.revents & POLLOUT) == 0)
        return WriteStatus::kClosed;
      continue;
    }
    return WriteStatus::kClosed;
  }
  return WriteStatus::kOk;
}

ChildProcess::ReadStatus ChildProcess::read_line(std::string& line,
                                                 std::chrono::steady_clock::time_point deadline) {
  char chunk[4096];
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line.assign(buffer_, 0, nl);
      buffer_.erase(0, nl + 1);
      return ReadStatus::kLine;
    }
    if (fd_ < 0) return ReadStatus::kEof;
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, remaining_ms(deadline));
    if (r < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::kEof;
    }
    if (r == 0) return ReadStatus::kTimeout;
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return ReadStatus::kEof;
    }
    if (n == 0) return ReadStatus::kEof;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

bool ChildProcess::running() {
  if (reaped_) return false;
  int status = 0;
  const pid_t r = ::waitpid(pid_, &status, WNOHANG);
  if (r == pid_) {
    reaped_ = true;
    exit_status_ = status;
    return false;
  }
  return r == 0;
}

void ChildProcess::terminate(std::chrono::milliseconds grace) {
  if (reaped_ || pid_ <= 0) return;
  const auto deadline = std::chrono::steady_clock::now() + grace;
  while (running() && std::chrono::steady_clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  if (!running()) return;
  ::kill(pid_, SIGKILL);
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  reaped_ = true;
  exit_status_ = status;
}

}  // namespace fgym
