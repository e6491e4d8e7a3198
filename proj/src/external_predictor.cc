#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <thread>

#include "reach/models.h"

extern char** environ;

namespace reach {
namespace {

void IgnoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string Errno(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}

}  // namespace

ExternalPredictor::ExternalPredictor(std::string command, std::size_t dimension)
    : command_(std::move(command)), dimension_(dimension) {
  if (command_.empty()) throw ModelError("empty predictor command");
}

ExternalPredictor::~ExternalPredictor() {
  try {
    Close();
  } catch (const Error&) {
    Abort();
  }
}

void ExternalPredictor::Start() {
  IgnoreSigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw ModelError(Errno("pipe"));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ModelError(Errno("pipe"));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  std::string sh = "/bin/sh", flag = "-c";
  char* argv[] = {sh.data(), flag.data(), command_.data(), nullptr};
  pid_t pid = -1;
  int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    throw ModelError("cannot start predictor '" + command_ +
                     "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFL, ::fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  ::fcntl(from_child_, F_SETFL, ::fcntl(from_child_, F_GETFL) | O_NONBLOCK);
  reaped_ = false;
  inbox_.clear();
}

std::vector<Prediction> ExternalPredictor::PredictBatch(
    std::span<const Point> points) {
  for (const auto& p : points) {
    if (p.size() != dimension_) {
      throw DomainError("point has " + std::to_string(p.size()) +
                        " values, predictor expects " +
                        std::to_string(dimension_));
    }
  }
  if (points.empty()) return {};
  if (pid_ < 0) Start();
  // Pick up anything written since the last batch (from_child_ is
  // nonblocking).
  char pending[4096];
  ssize_t got;
  while ((got = ::read(from_child_, pending, sizeof pending)) > 0) {
    inbox_.append(pending, static_cast<std::size_t>(got));
  }
  if (!inbox_.empty()) {
    Abort();
    throw ModelError("predictor wrote output nobody asked for");
  }

  std::string request;
  for (const auto& p : points) {
    request += FormatPoint(p);
    request.push_back('\n');
  }
  request.push_back('\n');

  std::vector<Prediction> out;
  out.reserve(points.size());
  std::size_t written = 0;
  std::size_t scanned = 0;
  char buf[65536];
  while (out.size() < points.size() || written < request.size()) {
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = {from_child_, POLLIN, 0};
    if (written < request.size()) fds[n++] = {to_child_, POLLOUT, 0};
    if (::poll(fds, n, -1) < 0) {
      if (errno == EINTR) continue;
      throw ModelError(Errno("poll"));
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t k = ::write(to_child_, request.data() + written,
                          request.size() - written);
      if (k < 0 && errno != EAGAIN && errno != EINTR) {
        Abort();
        throw ModelError("predictor stopped reading its input (" +
                         ExitDescription() + ")");
      }
      if (k > 0) written += static_cast<std::size_t>(k);
    }
    if (fds[0].revents & (POLLIN | POLLERR | POLLHUP)) {
      ssize_t k = ::read(from_child_, buf, sizeof buf);
      if (k < 0 && errno != EAGAIN && errno != EINTR) {
        Abort();
        throw ModelError(Errno("read from predictor"));
      }
      if (k == 0) {
        Abort();
        throw ModelError("predictor closed its output after " +
                         std::to_string(out.size()) + " of " +
                         std::to_string(points.size()) + " answers (" +
                         ExitDescription() + ")");
      }
      if (k > 0) inbox_.append(buf, static_cast<std::size_t>(k));
    }
    // Consume complete answer lines.
    while (out.size() < points.size()) {
      auto nl = inbox_.find('\n', scanned);
      if (nl == std::string::npos) {
        scanned = inbox_.size();
        break;
      }
      std::string_view line(inbox_.data(), nl);
      if (line != "0" && line != "1") {
        std::string shown(line.substr(0, 40));
        Abort();
        throw ModelError("malformed predictor answer '" + shown +
                         "' for point " + std::to_string(out.size()));
      }
      out.push_back(line == "1" ? 1 : 0);
      inbox_.erase(0, nl + 1);
      scanned = 0;
    }
  }
  if (!inbox_.empty()) {
    Abort();
    throw ModelError("predictor answered with more lines than points");
  }
  return out;
}

void ExternalPredictor::Close() {
  if (pid_ < 0) return;
  ::close(to_child_);
  to_child_ = -1;
  // Drain whatever is left so the child can exit, and remember it.
  ::fcntl(from_child_, F_SETFL, ::fcntl(from_child_, F_GETFL) & ~O_NONBLOCK);
  char buf[4096];
  while (true) {
    ssize_t k = ::read(from_child_, buf, sizeof buf);
    if (k > 0) {
      inbox_.append(buf, static_cast<std::size_t>(k));
      continue;
    }
    if (k < 0 && errno == EINTR) continue;
    break;
  }
  ::close(from_child_);
  from_child_ = -1;
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  exit_status_ = status;
  reaped_ = true;
  pid_ = -1;
  const bool trailing = !inbox_.empty();
  inbox_.clear();
  if (trailing) throw ModelError("predictor wrote output nobody asked for");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw ModelError("predictor ended with " + ExitDescription());
  }
}

void ExternalPredictor::Abort() {
  if (pid_ < 0) return;
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  int status = 0;
  // Give a dying child a moment to report its own status before killing it.
  pid_t r = 0;
  for (int i = 0; i < 50 && r == 0; ++i) {
    r = ::waitpid(pid_, &status, WNOHANG);
    if (r == 0) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (r == 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
  exit_status_ = status;
  reaped_ = true;
  pid_ = -1;
  inbox_.clear();
}

std::string ExternalPredictor::ExitDescription() {
  if (!reaped_) return "still running";
  if (WIFEXITED(exit_status_)) {
    return "exit status " + std::to_string(WEXITSTATUS(exit_status_));
  }
  if (WIFSIGNALED(exit_status_)) {
    return "signal " + std::to_string(WTERMSIG(exit_status_));
  }
  return "unknown status";
}

}  // namespace reach
