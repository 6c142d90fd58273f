#pragma once

namespace dbgpilot {

/// Routes SIGINT to a flag instead of terminating the process. Long
/// operations poll the flag and abandon the current chat turn.
void install_interrupt_handler();

bool interrupt_requested() noexcept;
void request_interrupt() noexcept;
void clear_interrupt() noexcept;

}  // namespace dbgpilot
