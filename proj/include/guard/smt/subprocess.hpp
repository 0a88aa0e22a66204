#ifndef GUARD_SMT_SUBPROCESS_HPP
#define GUARD_SMT_SUBPROCESS_HPP

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "guard/error.hpp"

namespace guard::smt {

struct ProcessResult {
  std::string out;
  std::string err;
  int exit_code = -1;
  int term_signal = 0; // nonzero when the child died from a signal we did not send
  bool timed_out = false;
};

namespace detail {

class Fd {
public:
  Fd() = default;
  explicit Fd(int fd)
    : fd_{fd}
  {}
  Fd(const Fd &) = delete;
  Fd &operator=(const Fd &) = delete;
  Fd(Fd &&o) noexcept
    : fd_{o.release()}
  {}
  Fd &operator=(Fd &&o) noexcept
  {
    reset(o.release());
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  int release()
  {
    int f = fd_;
    fd_ = -1;
    return f;
  }
  void reset(int f = -1)
  {
    if (fd_ >= 0)
      ::close(fd_);
    fd_ = f;
  }

private:
  int fd_ = -1;
};

inline std::pair<Fd, Fd> make_pipe()
{
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0)
    throw SolverEnvironmentError(std::string("pipe: ") + std::strerror(errno));
  return {Fd{fds[0]}, Fd{fds[1]}};
}

inline void ignore_sigpipe()
{
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

} // namespace detail

// Runs argv[0] (PATH lookup) with `input` on stdin. The child is killed once
// `deadline` elapses. Failure to start the program throws SolverEnvironmentError.
inline ProcessResult run_process(const std::vector<std::string> &argv, const std::string &input,
                                 std::chrono::milliseconds deadline)
{
  detail::ignore_sigpipe();
  auto [in_r, in_w] = detail::make_pipe();
  auto [out_r, out_w] = detail::make_pipe();
  auto [err_r, err_w] = detail::make_pipe();
  auto [exec_r, exec_w] = detail::make_pipe();

  std::vector<char *> cargv;
  for (auto &a : argv)
    cargv.push_back(const_cast<char *>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0)
    throw SolverEnvironmentError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_r.get(), 0);
    ::dup2(out_w.get(), 1);
    ::dup2(err_w.get(), 2);
    ::execvp(cargv[0], cargv.data());
    int e = errno;
    ssize_t ignored = ::write(exec_w.get(), &e, sizeof e);
    (void)ignored;
    ::_exit(127);
  }
  in_r.reset();
  out_w.reset();
  err_w.reset();
  exec_w.reset();

  int exec_errno = 0;
  if (::read(exec_r.get(), &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    ::waitpid(pid, nullptr, 0);
    throw SolverEnvironmentError("cannot execute '" + argv[0] + "': " + std::strerror(exec_errno));
  }

  ::fcntl(in_w.get(), F_SETFL, O_NONBLOCK);
  ProcessResult result;
  size_t written = 0;
  if (input.empty())
    in_w.reset();
  auto start = std::chrono::steady_clock::now();
  char buf[65536];
  while (out_r.get() >= 0 || err_r.get() >= 0) {
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
    if (elapsed >= deadline) {
      ::kill(pid, SIGKILL);
      result.timed_out = true;
      break;
    }
    std::vector<pollfd> fds;
    if (in_w.get() >= 0)
      fds.push_back({in_w.get(), POLLOUT, 0});
    if (out_r.get() >= 0)
      fds.push_back({out_r.get(), POLLIN, 0});
    if (err_r.get() >= 0)
      fds.push_back({err_r.get(), POLLIN, 0});
    int wait_ms = static_cast<int>((deadline - elapsed).count());
    int n = ::poll(fds.data(), fds.size(), wait_ms);
    if (n < 0 && errno != EINTR)
      break;
    for (auto &p : fds) {
      if (!p.revents)
        continue;
      if (p.fd == in_w.get()) {
        ssize_t w = ::write(in_w.get(), input.data() + written, input.size() - written);
        if (w > 0)
          written += static_cast<size_t>(w);
        if (w < 0 && errno != EAGAIN)
          in_w.reset();
        if (written == input.size())
          in_w.reset();
      } else {
        ssize_t r = ::read(p.fd, buf, sizeof buf);
        bool is_out = p.fd == out_r.get();
        if (r > 0) {
          (is_out ? result.out : result.err).append(buf, static_cast<size_t>(r));
        } else if (r == 0 || errno != EINTR) {
          (is_out ? out_r : err_r).reset();
        }
      }
    }
  }
  in_w.reset();
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status) && !result.timed_out)
    result.term_signal = WTERMSIG(status);
  return result;
}

} // namespace guard::smt

#endif // GUARD_SMT_SUBPROCESS_HPP
