#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "lcbench/adapters.hpp"

extern char** environ;

namespace lcbench {

Subprocess::Subprocess(const std::string& command) {
  int fds[2];
  if (pipe2(fds, O_CLOEXEC) != 0) throw StageError(std::string("pipe failed: ") + std::strerror(errno));
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  // Own process group, so terminate() reaches the command's children too.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  const int rc = posix_spawn(&pid_, "/bin/sh", &actions, &attr, const_cast<char* const*>(argv), environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  close(fds[1]);
  if (rc != 0) {
    close(fds[0]);
    pid_ = -1;
    throw StageError("cannot launch '" + command + "': " + std::strerror(rc));
  }
  fd_ = fds[0];
}

Subprocess::~Subprocess() {
  if (running()) {
    terminate();
    wait();
  }
  if (fd_ >= 0) close(fd_);
}

std::optional<std::string> Subprocess::read_line() {
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (fd_ < 0) break;
    char chunk[4096];
    const ssize_t n = ::read(fd_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      close(fd_);
      fd_ = -1;
      break;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  if (buffer_.empty()) return std::nullopt;
  std::string rest = std::move(buffer_);
  buffer_.clear();
  return rest;
}

int Subprocess::wait() {
  if (pid_ <= 0 || exited_) return status_;
  int raw = 0;
  while (waitpid(pid_, &raw, 0) < 0) {
    if (errno != EINTR) throw StageError(std::string("waitpid failed: ") + std::strerror(errno));
  }
  exited_ = true;
  if (WIFEXITED(raw)) {
    status_ = WEXITSTATUS(raw);
  } else if (WIFSIGNALED(raw)) {
    status_ = 128 + WTERMSIG(raw);
  }
  return status_;
}

void Subprocess::terminate() {
  if (running()) ::kill(-pid_, SIGTERM);
}

StageProcessResult RunStageProcess(const std::string& command, Stage stage, TraceRecorder& recorder) {
  StageProcessResult result;
  const Millis launched = recorder.clock().now();
  Subprocess proc(command);
  std::optional<Millis> offset;
  while (auto line = proc.read_line()) {
    if (!IsMarkerLine(*line)) {
      result.output.push_back(std::move(*line));
      continue;
    }
    MarkerMessage m;
    try {
      m = ParseMarker(*line);
    } catch (const MarkerError& e) {
      proc.terminate();
      proc.wait();
      throw StageError(std::string(ToString(stage)) + " stage failed: " + e.what());
    }
    if (!offset) offset = recorder.clock().now() - m.t;
    try {
      recorder.mark_stage(m.stage, m.edge, m.t + *offset);
    } catch (const Error& e) {
      proc.terminate();
      proc.wait();
      throw StageError(std::string(ToString(stage)) + " stage failed: marker '" + *line + "' rejected: " + e.what());
    }
    result.markers.push_back(std::move(m));
  }
  result.exit_status = proc.wait();
  if (result.exit_status != 0) {
    throw StageError(std::string(ToString(stage)) + " stage failed: '" + command + "' exited with status " +
                     std::to_string(result.exit_status));
  }
  if (result.markers.empty()) {
    Millis end = recorder.clock().now();
    if (end <= launched) end = launched + 1;
    recorder.mark_stage(stage, Edge::Begin, launched);
    recorder.mark_stage(stage, Edge::End, end);
    result.wrapped = true;
  }
  return result;
}

}  // namespace lcbench
