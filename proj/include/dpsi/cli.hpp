#pragma once

#include <ostream>

namespace dpsi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitProtocol = 3;
inline constexpr int kExitIo = 4;

/// Entry point of the dpsi tool. Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dpsi
