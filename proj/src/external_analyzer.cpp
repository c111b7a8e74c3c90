#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <mutex>
#include <utility>

#include "igs/error.hpp"
#include "igs/hashing.hpp"
#include "igs/sentiment.hpp"

namespace igs {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    reset();
    fd_ = std::exchange(o.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw ExternalAnalyzerError(std::string("pipe: ") + std::strerror(errno));
  }
  return Pipe{Fd(fds[0]), Fd(fds[1])};
}

struct ProcessResult {
  int status = 0;
  std::string out;
};

ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input) {
  // A child that exits without draining stdin must not kill us with SIGPIPE.
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

  Pipe in = make_pipe();
  Pipe out = make_pipe();
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw ExternalAnalyzerError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in.read.get(), STDIN_FILENO);
    ::dup2(out.write.get(), STDOUT_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  in.read.reset();
  out.write.reset();
  ::fcntl(in.write.get(), F_SETFL, O_NONBLOCK);

  ProcessResult result;
  std::size_t written = 0;
  if (input.empty()) in.write.reset();
  char buf[4096];
  while (out.read.get() >= 0) {
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = {out.read.get(), POLLIN, 0};
    if (in.write.get() >= 0) fds[n++] = {in.write.get(), POLLOUT, 0};
    if (::poll(fds, n, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = ::write(in.write.get(), input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN && errno != EINTR) written = input.size();
      if (written >= input.size()) in.write.reset();
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t r = ::read(out.read.get(), buf, sizeof buf);
      if (r > 0) {
        result.out.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || (errno != EAGAIN && errno != EINTR)) {
        out.read.reset();
      }
    }
  }
  in.write.reset();
  while (::waitpid(pid, &result.status, 0) < 0 && errno == EINTR) {
  }
  return result;
}

}  // namespace

ExternalCommandAnalyzer::ExternalCommandAnalyzer(AnalyzerDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  if (descriptor_.command.empty()) {
    throw ExternalAnalyzerError("analyzer " + descriptor_.analyzer_id + " has an empty command");
  }
}

std::string ExternalCommandAnalyzer::fingerprint() const {
  std::string joined;
  for (const auto& a : descriptor_.command) {
    joined += std::to_string(a.size()) + ":" + a + ",";
  }
  return "cmd-" + sha256_hex(joined);
}

SentimentScore ExternalCommandAnalyzer::analyze(std::string_view text) const {
  const auto result = run_process(descriptor_.command, text);
  const std::string& cmd = descriptor_.command.front();
  if (!WIFEXITED(result.status)) {
    throw ExternalAnalyzerError("analyzer command '" + cmd + "' terminated abnormally");
  }
  if (WEXITSTATUS(result.status) != 0) {
    throw ExternalAnalyzerError("analyzer command '" + cmd + "' exited with status " +
                                std::to_string(WEXITSTATUS(result.status)));
  }
  std::string_view out = result.out;
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.front()))) out.remove_prefix(1);
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.remove_suffix(1);
  if (!out.empty() && out.front() == '+') out.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(out.data(), out.data() + out.size(), value);
  if (out.empty() || ec != std::errc{} || ptr != out.data() + out.size()) {
    throw ExternalAnalyzerError("analyzer command '" + cmd + "' printed malformed output: \"" +
                                std::string(result.out.substr(0, 80)) + "\"");
  }
  if (!(value >= -1.0 && value <= 1.0)) {
    throw ExternalAnalyzerError("analyzer command '" + cmd + "' returned " + std::string(out) +
                                ", outside [-1, 1]");
  }
  return SentimentScore{value};
}

}  // namespace igs
