#include "internal/terminal_capture.hpp"

#include <fcntl.h>
#include <poll.h>
#include <stdlib.h>
#include <termios.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "dbgpilot/errors.hpp"

namespace dbgpilot {

TerminalCapture::TerminalCapture() {
  master_ = ::posix_openpt(O_RDWR | O_NOCTTY | O_CLOEXEC);
  if (master_ < 0 || ::grantpt(master_) != 0 || ::unlockpt(master_) != 0) {
    const std::string why = std::strerror(errno);
    if (master_ >= 0) ::close(master_);
    throw Error(Errc::ConfigError, "cannot allocate a terminal for the target: " + why);
  }
  char name[128];
  if (::ptsname_r(master_, name, sizeof name) != 0) {
    ::close(master_);
    throw Error(Errc::ConfigError, "cannot name the target terminal");
  }
  slave_path_ = name;
  slave_ = ::open(name, O_RDWR | O_NOCTTY | O_CLOEXEC);
  if (slave_ < 0) {
    ::close(master_);
    throw Error(Errc::ConfigError, "cannot open the target terminal " + slave_path_);
  }
  // Raw mode: no echo, no CR insertion, bytes pass through unchanged.
  termios tio{};
  if (::tcgetattr(slave_, &tio) == 0) {
    ::cfmakeraw(&tio);
    ::tcsetattr(slave_, TCSANOW, &tio);
  }
  ::fcntl(master_, F_SETFL, ::fcntl(master_, F_GETFL) | O_NONBLOCK);
  reader_ = std::thread([this] { run(); });
}

TerminalCapture::~TerminalCapture() {
  stop_ = true;
  if (reader_.joinable()) reader_.join();
  ::close(slave_);
  ::close(master_);
}

void TerminalCapture::drain_locked() {
  char chunk[4096];
  for (;;) {
    ssize_t n = ::read(master_, chunk, sizeof chunk);
    if (n > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    return;
  }
}

void TerminalCapture::run() {
  while (!stop_) {
    pollfd p{master_, POLLIN, 0};
    if (::poll(&p, 1, 50) > 0) {
      std::lock_guard lock(mu_);
      drain_locked();
    }
  }
}

std::string TerminalCapture::contents() {
  std::lock_guard lock(mu_);
  drain_locked();
  return buffer_;
}

}  // namespace dbgpilot
