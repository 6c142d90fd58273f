#include "dbgpilot/interrupt.hpp"

#include <csignal>

namespace dbgpilot {

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_sigint(int) { g_interrupted = 1; }

}  // namespace

void install_interrupt_handler() {
  struct sigaction sa {};
  sa.sa_handler = on_sigint;
  sigemptyset(&sa.sa_mask);
  sa.sa_flags = 0;  // no SA_RESTART: blocking reads should return EINTR
  sigaction(SIGINT, &sa, nullptr);
}

bool interrupt_requested() noexcept { return g_interrupted != 0; }
void request_interrupt() noexcept { g_interrupted = 1; }
void clear_interrupt() noexcept { g_interrupted = 0; }

}  // namespace dbgpilot
